#include "tpb/simulate.hpp"

#include <cmath>
#include <string>

#include "tpb/error.hpp"

namespace tpb {

void validate_config(const CoxSimConfig& config) {
  require(config.N >= 2, ErrorCode::invalid_argument, "N must be at least 2");
  require(config.lambda0 > 0.0, ErrorCode::invalid_argument, "lambda0 must be positive");
  require(config.cens_upper > 0.0, ErrorCode::invalid_argument, "cens_upper must be positive");
  auto in_unit = [](double p) { return p > 0.0 && p < 1.0; };
  require(in_unit(config.sensitivity) && in_unit(config.specificity) &&
              in_unit(config.exposure_prev),
          ErrorCode::invalid_argument, "sensitivity/specificity/prevalence must lie in (0,1)");
  require(config.phase2_fraction > 0.0 && config.phase2_fraction <= 1.0,
          ErrorCode::invalid_argument, "phase2_fraction must lie in (0,1]");
  require(std::isfinite(config.theta), ErrorCode::invalid_argument, "theta must be finite");
}

TwoPhaseSample generate_cox_sample(const CoxSimConfig& config, Rng& rng) {
  validate_config(config);

  TwoPhaseSample sample;
  sample.units.resize(static_cast<std::size_t>(config.N));
  std::vector<std::vector<std::size_t>> stratum_members(3);

  for (std::int64_t i = 0; i < config.N; ++i) {
    Unit& u = sample.units[static_cast<std::size_t>(i)];
    u.id = i + 1;

    double x = rng.uniform() < config.exposure_prev ? 1.0 : 0.0;
    double v;
    if (x == 1.0) {
      v = rng.uniform() < config.sensitivity ? 1.0 : 0.0;
    } else {
      v = rng.uniform() < config.specificity ? 0.0 : 1.0;
    }
    double rate = config.lambda0 * std::exp(config.theta * x);
    double t = -std::log(1.0 - rng.uniform()) / rate;
    double c = config.cens_upper * rng.uniform();
    u.y = std::min(t, c);
    u.delta = t <= c ? 1.0 : 0.0;
    u.v = {v};
    u.x = {x};  // payload column; cleared below on unsampled units

    u.stratum = u.delta == 1.0 ? 1 : (v == 0.0 ? 2 : 3);
    stratum_members[static_cast<std::size_t>(u.stratum - 1)].push_back(
        static_cast<std::size_t>(i));
  }

  for (int j = 0; j < 3; ++j) {
    require(!stratum_members[static_cast<std::size_t>(j)].empty(), ErrorCode::degenerate_stratum,
            "stratum " + std::to_string(j + 1) + " is empty; reseed or enlarge N");
  }

  sample.strata.resize(3);
  for (int j = 0; j < 3; ++j) {
    const auto& members = stratum_members[static_cast<std::size_t>(j)];
    std::int64_t N_j = static_cast<std::int64_t>(members.size());
    std::int64_t n_j;
    if (j == 0) {
      n_j = N_j;  // events are always ascertained
      for (std::size_t i : members) sample.units[i].sampled = true;
    } else {
      n_j = static_cast<std::int64_t>(
          std::floor(config.phase2_fraction * static_cast<double>(N_j)));
      n_j = std::max<std::int64_t>(1, std::min(n_j, N_j));
      std::vector<char> mask = srswor_mask(N_j, n_j, rng);
      for (std::size_t k = 0; k < members.size(); ++k)
        sample.units[members[k]].sampled = mask[k] != 0;
    }
    sample.strata[static_cast<std::size_t>(j)] = {j + 1, N_j, n_j};
  }

  for (Unit& u : sample.units)
    if (!u.sampled) u.x.clear();

  validate_sample(sample);
  return sample;
}

TwoPhaseSample generate_cox_sample(const CoxSimConfig& config) {
  Rng rng = Rng::substream(config.seed, 0, 0);
  return generate_cox_sample(config, rng);
}

}  // namespace tpb
