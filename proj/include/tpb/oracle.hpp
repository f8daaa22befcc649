#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tpb/calibration.hpp"
#include "tpb/linalg.hpp"

namespace tpb {

// Finite discrete data model with known stratum fractions: the setting where
// the limit covariances of the weak-convergence theory have closed forms.
struct DiscreteAtom {
  int stratum = 1;
  double prob = 0.0;
  std::vector<double> v;  // auxiliary values (for the calibrated flavors)
  std::vector<double> f;  // panel function values
};

struct DiscreteModel {
  std::vector<DiscreteAtom> atoms;
  std::vector<double> p;  // limiting phase-II fractions, stratum id 1.. -> p[id-1]

  std::size_t num_functions() const { return atoms.empty() ? 0 : atoms.front().f.size(); }
  std::size_t num_aux() const { return atoms.empty() ? 0 : atoms.front().v.size(); }
};

void validate_model(const DiscreteModel& model);

// Phase-I covariance kernel: Brownian bridge (centered bootstrap process and
// the non-bootstrap process) or Brownian motion (uncentered bootstrap).
enum class OracleFlavor { bridge, motion };

// Limit covariance of the process at panel functions fi, gi:
//   phase-I term   Cov_P0(f, g)   (bridge)  or  P0(f g)  (motion)
//   stratum term   sum_j nu_j (1-p_j)/p_j Cov_{0|j}(f', g')
// with f' = f - Q_# f under a calibrated flavor and f' = f otherwise.
double limit_covariance(const DiscreteModel& model, std::size_t fi, std::size_t gi,
                        OracleFlavor flavor,
                        std::optional<CalVariant> calibrated = std::nullopt);

// Q_# f evaluated at every atom, from exact model moments.
std::vector<double> oracle_project_Q(const DiscreteModel& model, const std::vector<double>& f,
                                     CalVariant variant);

// Exhaustive joint law of (xi, W^(2)) for one stratum: every subset of size
// n_j times every mixture outcome, weights attached in ascending index order.
struct Phase2Outcome {
  std::vector<std::int64_t> weights;  // length N_j, zero off the subset
  double prob = 0.0;
};

struct Phase2Enumeration {
  std::vector<Phase2Outcome> outcomes;
  double marginal_mean = 0.0;  // E W^(2)_i given sampled
  double marginal_var = 0.0;   // Var(W^(2)_i | sampled)
};

Phase2Enumeration enumerate_phase2_design(std::int64_t N_j, std::int64_t n_j);

// Exact pmf of the mixture weight vector given the sampled set (exchangeable
// coordinates, length n_j).
std::vector<std::pair<std::vector<std::int64_t>, double>> phase2_weight_pmf(std::int64_t N_j,
                                                                            std::int64_t n_j);

}  // namespace tpb
