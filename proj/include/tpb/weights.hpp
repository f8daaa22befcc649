#pragma once

#include <cstdint>
#include <vector>

#include "tpb/design.hpp"
#include "tpb/rng.hpp"

namespace tpb {

// Product bootstrap weights for one replicate, aligned with sample.units.
// w1 is positive everywhere, w2 is a nonnegative integer count that is zero
// exactly on unsampled units and sums to n_j within each stratum; w = w1*w2.
struct BootstrapWeights {
  std::vector<double> w1;
  std::vector<double> w2;
  std::vector<double> w;
};

// N_j = n_j * k_j + r_j and the mixing probability
// s_j = (1 - r_j/n_j)(1 - r_j/(N_j - 1)).
struct Phase2MixtureParams {
  std::int64_t k = 0;
  std::int64_t r = 0;
  double s = 1.0;
};

Phase2MixtureParams phase2_mixture_params(std::int64_t N_j, std::int64_t n_j);

struct Phase1Options {
  // Lemma-style bounded-weight variant: resample until w <= bound.
  // Infinity (the default) means the plain Gamma law.
  double truncation_bound = 0.0;  // <= 0 disables truncation
};

// i.i.d. within-stratum multipliers with mean 1 and variance p_j/(2-p_j),
// drawn as Gamma(1/c^2, c^2). Defined for all N units.
std::vector<double> phase1_weights(const TwoPhaseSample& sample, Rng& rng,
                                   const Phase1Options& options = {});

// Exact multivariate hypergeometric draw: n balls without replacement from
// groups of sizes `group_sizes`; returns the per-group counts.
std::vector<std::int64_t> mh_sample(std::int64_t n, const std::vector<std::int64_t>& group_sizes,
                                    Rng& rng);

// One stratum's phase-II weight vector for its n_j sampled units, in the
// ascending-original-index order. `component` records which mixture component
// was drawn (0: sizes k_j, 1: sizes k_j + 1).
struct StratumPhase2Draw {
  std::vector<std::int64_t> counts;
  int component = 0;
};

StratumPhase2Draw draw_stratum_phase2(std::int64_t N_j, std::int64_t n_j, Rng& rng);

// Phase-II weights for the whole sample: zero on unsampled units, the
// stratum draw attached to sampled units in ascending unit-id order.
std::vector<double> phase2_weights(const TwoPhaseSample& sample, Rng& rng);
std::vector<double> phase2_weights(const TwoPhaseSample& sample, const DesignIndex& index,
                                   Rng& rng);

BootstrapWeights combine_weights(const std::vector<double>& w1, const std::vector<double>& w2);

// Full replicate draw: independent phase-I and phase-II streams.
BootstrapWeights draw_bootstrap_weights(const TwoPhaseSample& sample, const DesignIndex& index,
                                        Rng& rng_phase1, Rng& rng_phase2,
                                        const Phase1Options& options = {});

}  // namespace tpb
