#pragma once

#include <cstdint>
#include <vector>

#include "tpb/rng.hpp"

namespace tpb {

// One sampling stratum: N units observed at phase I, n of them subsampled
// without replacement at phase II.
struct StratumSpec {
  int id = 0;            // label in 1..J
  std::int64_t N = 0;    // phase-I count
  std::int64_t n = 0;    // phase-II count
};

// One observation. Phase-I variables (y, delta, v) are known for everyone;
// the payload x is known only when sampled (xi = 1).
struct Unit {
  std::int64_t id = 0;
  int stratum = 0;
  bool sampled = false;
  double y = 0.0;
  double delta = 0.0;
  std::vector<double> v;
  std::vector<double> x;
};

struct TwoPhaseSample {
  std::vector<Unit> units;
  std::vector<StratumSpec> strata;

  std::size_t size() const { return units.size(); }
  std::size_t num_strata() const { return strata.size(); }
};

struct DesignProbabilities {
  std::vector<double> pi0;     // stratum j (1-based id) -> n_j / N_j
  std::vector<double> nu_hat;  // stratum j -> N_j / N

  double pi0_of(int stratum_id) const { return pi0[static_cast<std::size_t>(stratum_id) - 1]; }
};

// Per-stratum unit positions, each list in ascending unit-id order. The
// sampled list order is what the phase-II weight attachment rule uses.
struct DesignIndex {
  std::vector<std::vector<std::size_t>> members;
  std::vector<std::vector<std::size_t>> sampled;
};

// Checks every TwoPhaseSample invariant; throws on the first violation.
void validate_sample(const TwoPhaseSample& sample);

DesignProbabilities design_probabilities(const TwoPhaseSample& sample);

DesignIndex build_index(const TwoPhaseSample& sample);

// Per-unit IPW weight xi / pi0 (zero for unsampled units).
std::vector<double> ipw_base_weights(const TwoPhaseSample& sample);

// Phase-II indicator assignment: within stratum j exactly
// max(1, floor(fraction_j * N_j)) indicators are set, uniformly without
// replacement.
std::vector<std::vector<char>> sample_phase2_indicators(const std::vector<std::int64_t>& sizes,
                                                        const std::vector<double>& fractions,
                                                        Rng& rng);

// SRSWOR of n picks out of N slots.
std::vector<char> srswor_mask(std::int64_t N, std::int64_t n, Rng& rng);

}  // namespace tpb
