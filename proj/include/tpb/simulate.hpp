#pragma once

#include <cstdint>

#include "tpb/design.hpp"
#include "tpb/rng.hpp"

namespace tpb {

// Synthetic two-phase Cox data: binary exposure x observed at phase II only,
// a misclassified surrogate v plus follow-up time and status observed at
// phase I. Strata: 1 = events (taken with probability one), 2 = censored
// with v = 0, 3 = censored with v = 1, the latter two subsampled at
// `phase2_fraction` without replacement.
struct CoxSimConfig {
  std::int64_t N = 400;
  double theta = 0.6931471805599453;  // log 2
  double lambda0 = 0.1;               // constant baseline hazard
  double cens_upper = 1.1;            // censoring ~ Unif(0, cens_upper)
  double sensitivity = 0.9;           // P(v=1 | x=1)
  double specificity = 0.9;           // P(v=0 | x=0)
  double exposure_prev = 0.5;         // P(x=1)
  double phase2_fraction = 0.3;       // f for the censored strata
  std::uint64_t seed = 0;
};

void validate_config(const CoxSimConfig& config);

TwoPhaseSample generate_cox_sample(const CoxSimConfig& config, Rng& rng);

// Convenience wrapper seeding the generator from config.seed.
TwoPhaseSample generate_cox_sample(const CoxSimConfig& config);

}  // namespace tpb
