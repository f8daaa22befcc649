#pragma once

#include <utility>
#include <vector>

#include "tpb/design.hpp"
#include "tpb/linalg.hpp"

namespace tpb {

struct CoxOptions {
  double grad_tol = 1e-8;     // infinity-norm of the weighted score
  int max_iter = 60;
  int max_halvings = 30;
  double theta_bound = 50.0;  // separation guard
};

// Weighted Cox partial-likelihood fit (Breslow ties). `info` is the observed
// weighted information divided by N, so inverse(info) estimates the
// complete-data asymptotic variance of sqrt(N)(theta_hat - theta_0).
struct CoxFit {
  std::vector<double> theta;
  Matrix info;                                      // p x p
  std::vector<std::pair<double, double>> baseline;  // Breslow (time, cumhaz)
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
  int n_events = 0;
};

// weights: total per-unit weight (IPW base times any bootstrap/calibration
// multipliers), nonnegative, zero on unsampled units.
CoxFit weighted_cox_fit(const TwoPhaseSample& sample, const std::vector<double>& weights,
                        const CoxOptions& options = {});

// Weighted log partial likelihood and score at an arbitrary theta.
double cox_loglik(const TwoPhaseSample& sample, const std::vector<double>& weights,
                  const std::vector<double>& theta);
std::vector<double> cox_score(const TwoPhaseSample& sample, const std::vector<double>& weights,
                              const std::vector<double>& theta);

std::vector<std::pair<double, double>> breslow_baseline(const TwoPhaseSample& sample,
                                                        const std::vector<double>& weights,
                                                        const std::vector<double>& theta);

// Estimated efficient-influence contributions, one row per unit (zero rows
// for unsampled units): inverse(info) times the martingale-residual score
// contribution at theta_hat.
Matrix influence_contributions(const CoxFit& fit, const TwoPhaseSample& sample,
                               const std::vector<double>& weights);

// Plug-in variance of sqrt(N)(theta_hat - theta_0):
//   inverse(info) + sum_j nu_j (1 - p_j)/p_j Cov_j(contributions)
// with Cov_j the within-stratum sample covariance over sampled units.
// Pass residualized contributions for calibrated fits.
Matrix standard_variance(const TwoPhaseSample& sample, const Matrix& contributions,
                         const Matrix& info);

}  // namespace tpb
