#include "tpb/design.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "tpb/error.hpp"

namespace tpb {

void validate_sample(const TwoPhaseSample& sample) {
  std::size_t J = sample.strata.size();
  require(J >= 1, ErrorCode::empty_stratum, "sample declares no strata");

  std::vector<char> seen(J, 0);
  for (const StratumSpec& s : sample.strata) {
    require(s.id >= 1 && static_cast<std::size_t>(s.id) <= J, ErrorCode::invalid_argument,
            "stratum ids must be labeled 1..J, got " + std::to_string(s.id));
    require(!seen[s.id - 1], ErrorCode::invalid_argument,
            "duplicate stratum id " + std::to_string(s.id));
    seen[s.id - 1] = 1;
    require(s.N >= 1, ErrorCode::empty_stratum, "stratum " + std::to_string(s.id) + " has N = 0");
    require(s.n >= 1 && s.n <= s.N, ErrorCode::stratum_count_mismatch,
            "stratum " + std::to_string(s.id) + " needs 1 <= n <= N");
  }

  std::vector<std::int64_t> count(J, 0), count_sampled(J, 0);
  std::set<std::int64_t> ids;
  std::size_t v_dim = sample.units.empty() ? 0 : sample.units.front().v.size();
  std::size_t x_dim = 0;
  bool x_dim_known = false;

  for (const Unit& u : sample.units) {
    require(u.stratum >= 1 && static_cast<std::size_t>(u.stratum) <= J,
            ErrorCode::invalid_argument,
            "unit " + std::to_string(u.id) + " references unknown stratum");
    require(ids.insert(u.id).second, ErrorCode::invalid_argument,
            "duplicate unit id " + std::to_string(u.id));
    require(u.v.size() == v_dim, ErrorCode::dimension_mismatch,
            "unit " + std::to_string(u.id) + " has inconsistent v dimension");
    ++count[u.stratum - 1];
    if (u.sampled) {
      ++count_sampled[u.stratum - 1];
      require(!u.x.empty(), ErrorCode::missing_payload,
              "unit " + std::to_string(u.id) + " sampled but payload absent");
      if (!x_dim_known) {
        x_dim = u.x.size();
        x_dim_known = true;
      }
      require(u.x.size() == x_dim, ErrorCode::dimension_mismatch,
              "unit " + std::to_string(u.id) + " has inconsistent x dimension");
    } else {
      require(u.x.empty(), ErrorCode::missing_payload,
              "unit " + std::to_string(u.id) + " not sampled but carries payload");
    }
  }

  for (const StratumSpec& s : sample.strata) {
    require(count[s.id - 1] == s.N, ErrorCode::stratum_count_mismatch,
            "stratum " + std::to_string(s.id) + " declares N = " + std::to_string(s.N) +
                " but holds " + std::to_string(count[s.id - 1]) + " units");
    require(count_sampled[s.id - 1] == s.n, ErrorCode::stratum_count_mismatch,
            "stratum " + std::to_string(s.id) + " declares n = " + std::to_string(s.n) +
                " but holds " + std::to_string(count_sampled[s.id - 1]) + " sampled units");
  }
}

DesignProbabilities design_probabilities(const TwoPhaseSample& sample) {
  std::size_t J = sample.strata.size();
  DesignProbabilities out;
  out.pi0.assign(J, 0.0);
  out.nu_hat.assign(J, 0.0);
  std::int64_t N = 0;
  for (const StratumSpec& s : sample.strata) N += s.N;
  require(N > 0, ErrorCode::empty_stratum, "empty sample");
  for (const StratumSpec& s : sample.strata) {
    out.pi0[s.id - 1] = static_cast<double>(s.n) / static_cast<double>(s.N);
    out.nu_hat[s.id - 1] = static_cast<double>(s.N) / static_cast<double>(N);
  }
  return out;
}

DesignIndex build_index(const TwoPhaseSample& sample) {
  std::size_t J = sample.strata.size();
  DesignIndex idx;
  idx.members.assign(J, {});
  idx.sampled.assign(J, {});
  // ascending unit id, so weight attachment does not depend on storage order
  std::vector<std::size_t> order(sample.units.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sample.units[a].id < sample.units[b].id;
  });
  for (std::size_t i : order) {
    const Unit& u = sample.units[i];
    idx.members[u.stratum - 1].push_back(i);
    if (u.sampled) idx.sampled[u.stratum - 1].push_back(i);
  }
  return idx;
}

std::vector<double> ipw_base_weights(const TwoPhaseSample& sample) {
  DesignProbabilities p = design_probabilities(sample);
  std::vector<double> w(sample.units.size(), 0.0);
  for (std::size_t i = 0; i < sample.units.size(); ++i) {
    const Unit& u = sample.units[i];
    if (u.sampled) w[i] = 1.0 / p.pi0_of(u.stratum);
  }
  return w;
}

std::vector<char> srswor_mask(std::int64_t N, std::int64_t n, Rng& rng) {
  require(N >= 1 && n >= 0 && n <= N, ErrorCode::invalid_argument, "srswor needs 0 <= n <= N");
  std::vector<std::int64_t> slots(static_cast<std::size_t>(N));
  for (std::int64_t i = 0; i < N; ++i) slots[static_cast<std::size_t>(i)] = i;
  std::vector<char> mask(static_cast<std::size_t>(N), 0);
  for (std::int64_t t = 0; t < n; ++t) {
    std::int64_t j = rng.uniform_int(t, N - 1);
    std::swap(slots[static_cast<std::size_t>(t)], slots[static_cast<std::size_t>(j)]);
    mask[static_cast<std::size_t>(slots[static_cast<std::size_t>(t)])] = 1;
  }
  return mask;
}

std::vector<std::vector<char>> sample_phase2_indicators(const std::vector<std::int64_t>& sizes,
                                                        const std::vector<double>& fractions,
                                                        Rng& rng) {
  require(sizes.size() == fractions.size(), ErrorCode::dimension_mismatch,
          "one sampling fraction per stratum");
  std::vector<std::vector<char>> out;
  out.reserve(sizes.size());
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    double f = fractions[j];
    require(f > 0.0 && f <= 1.0, ErrorCode::invalid_argument, "fractions must lie in (0, 1]");
    std::int64_t N = sizes[j];
    std::int64_t n = static_cast<std::int64_t>(std::floor(f * static_cast<double>(N)));
    n = std::max<std::int64_t>(1, std::min(n, N));
    out.push_back(srswor_mask(N, n, rng));
  }
  return out;
}

}  // namespace tpb
