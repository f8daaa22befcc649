#include "tpb/weights.hpp"

#include <cmath>
#include <string>

#include "tpb/error.hpp"

namespace tpb {

Phase2MixtureParams phase2_mixture_params(std::int64_t N_j, std::int64_t n_j) {
  require(n_j >= 1 && n_j <= N_j, ErrorCode::invalid_argument, "need 1 <= n_j <= N_j");
  Phase2MixtureParams p;
  p.k = N_j / n_j;
  p.r = N_j % n_j;
  if (p.r == 0) {
    p.s = 1.0;  // single-component case (also avoids 0/0 at N_j = 1)
  } else {
    p.s = (1.0 - static_cast<double>(p.r) / static_cast<double>(n_j)) *
          (1.0 - static_cast<double>(p.r) / static_cast<double>(N_j - 1));
  }
  return p;
}

std::vector<double> phase1_weights(const TwoPhaseSample& sample, Rng& rng,
                                   const Phase1Options& options) {
  DesignProbabilities probs = design_probabilities(sample);
  std::size_t J = sample.strata.size();
  std::vector<double> shape(J), scale(J);
  for (const StratumSpec& s : sample.strata) {
    double p = probs.pi0[s.id - 1];
    double c2 = p / (2.0 - p);
    shape[s.id - 1] = 1.0 / c2;
    scale[s.id - 1] = c2;
  }
  std::vector<double> w1(sample.units.size());
  for (std::size_t i = 0; i < sample.units.size(); ++i) {
    int j = sample.units[i].stratum - 1;
    double w = rng.gamma(shape[j], scale[j]);
    if (options.truncation_bound > 0.0) {
      while (w > options.truncation_bound) w = rng.gamma(shape[j], scale[j]);
    }
    w1[i] = w;
  }
  return w1;
}

std::vector<std::int64_t> mh_sample(std::int64_t n, const std::vector<std::int64_t>& group_sizes,
                                    Rng& rng) {
  std::int64_t total = 0;
  for (std::int64_t m : group_sizes) {
    require(m >= 0, ErrorCode::invalid_argument, "group sizes must be nonnegative");
    total += m;
  }
  require(n >= 0 && n <= total, ErrorCode::invalid_argument, "need 0 <= n <= sum of group sizes");

  // sequential conditional draws: group i gets H(remaining total, m_i, remaining n)
  std::vector<std::int64_t> counts(group_sizes.size(), 0);
  std::int64_t remaining_total = total, remaining_n = n;
  for (std::size_t i = 0; i < group_sizes.size() && remaining_n > 0; ++i) {
    std::int64_t c;
    if (remaining_total == remaining_n) {
      c = group_sizes[i];  // must take everything that is left
    } else {
      c = rng.hypergeometric(remaining_total, group_sizes[i], remaining_n);
    }
    counts[i] = c;
    remaining_total -= group_sizes[i];
    remaining_n -= c;
  }
  return counts;
}

StratumPhase2Draw draw_stratum_phase2(std::int64_t N_j, std::int64_t n_j, Rng& rng) {
  Phase2MixtureParams p = phase2_mixture_params(N_j, n_j);
  StratumPhase2Draw draw;
  std::int64_t group = p.k;
  if (p.r != 0 && rng.uniform() >= p.s) {
    group = p.k + 1;
    draw.component = 1;
  }
  std::vector<std::int64_t> sizes(static_cast<std::size_t>(n_j), group);
  draw.counts = mh_sample(n_j, sizes, rng);
  return draw;
}

std::vector<double> phase2_weights(const TwoPhaseSample& sample, const DesignIndex& index,
                                   Rng& rng) {
  std::vector<double> w2(sample.units.size(), 0.0);
  for (const StratumSpec& s : sample.strata) {
    StratumPhase2Draw draw = draw_stratum_phase2(s.N, s.n, rng);
    const auto& sampled = index.sampled[s.id - 1];
    for (std::size_t k = 0; k < sampled.size(); ++k)
      w2[sampled[k]] = static_cast<double>(draw.counts[k]);
  }
  return w2;
}

std::vector<double> phase2_weights(const TwoPhaseSample& sample, Rng& rng) {
  DesignIndex index = build_index(sample);
  return phase2_weights(sample, index, rng);
}

BootstrapWeights combine_weights(const std::vector<double>& w1, const std::vector<double>& w2) {
  require(w1.size() == w2.size(), ErrorCode::dimension_mismatch,
          "phase-I and phase-II weight vectors differ in length");
  BootstrapWeights out;
  out.w1 = w1;
  out.w2 = w2;
  out.w.resize(w1.size());
  for (std::size_t i = 0; i < w1.size(); ++i) out.w[i] = w1[i] * w2[i];
  return out;
}

BootstrapWeights draw_bootstrap_weights(const TwoPhaseSample& sample, const DesignIndex& index,
                                        Rng& rng_phase1, Rng& rng_phase2,
                                        const Phase1Options& options) {
  return combine_weights(phase1_weights(sample, rng_phase1, options),
                         phase2_weights(sample, index, rng_phase2));
}

}  // namespace tpb
