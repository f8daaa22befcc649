#pragma once

#include <vector>

namespace tpb {

double mean(const std::vector<double>& x);

// unbiased (n-1) sample variance
double sample_variance(const std::vector<double>& x);

// linear-interpolation quantile on a sorted copy (the usual "type 7" rule)
double quantile(std::vector<double> x, double q);

// P(ChiSquare_df > x), via the regularized incomplete gamma function
double chi_square_sf(double x, double df);

}  // namespace tpb
