#include "tpb/oracle.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <string>

#include "tpb/error.hpp"
#include "tpb/weights.hpp"

namespace tpb {

void validate_model(const DiscreteModel& model) {
  require(!model.atoms.empty(), ErrorCode::invalid_argument, "model has no atoms");
  double total = 0.0;
  std::size_t nf = model.num_functions(), nv = model.num_aux();
  for (const DiscreteAtom& a : model.atoms) {
    require(a.prob > 0.0, ErrorCode::invalid_argument, "atom probabilities must be positive");
    require(a.stratum >= 1 && static_cast<std::size_t>(a.stratum) <= model.p.size(),
            ErrorCode::invalid_argument, "atom references unknown stratum");
    require(a.f.size() == nf && a.v.size() == nv, ErrorCode::dimension_mismatch,
            "ragged atom values");
    total += a.prob;
  }
  require(std::abs(total - 1.0) < 1e-12, ErrorCode::invalid_argument,
          "atom probabilities must sum to 1");
  for (double pj : model.p)
    require(pj > 0.0 && pj <= 1.0, ErrorCode::invalid_argument, "fractions must lie in (0,1]");
}

std::vector<double> oracle_project_Q(const DiscreteModel& model, const std::vector<double>& f,
                                     CalVariant variant) {
  require(variant == CalVariant::c || variant == CalVariant::cc, ErrorCode::invalid_argument,
          "projection is defined for variants c and cc");
  std::size_t k = model.num_aux();
  require(k >= 1, ErrorCode::invalid_argument, "model carries no auxiliary values");
  require(f.size() == model.atoms.size(), ErrorCode::dimension_mismatch,
          "one f value per atom required");

  bool centered = variant == CalVariant::cc;
  std::vector<double> center(k, 0.0);
  if (centered) {
    for (const DiscreteAtom& a : model.atoms)
      for (std::size_t c = 0; c < k; ++c) center[c] += a.prob * a.v[c];
  }
  auto tau = [&](const DiscreteAtom& a) {
    return centered ? 1.0 / model.p[static_cast<std::size_t>(a.stratum - 1)] - 1.0 : 1.0;
  };

  Matrix gram(k, k);
  std::vector<double> cross(k, 0.0);
  for (std::size_t i = 0; i < model.atoms.size(); ++i) {
    const DiscreteAtom& a = model.atoms[i];
    double t = a.prob * tau(a);
    if (t == 0.0) continue;
    for (std::size_t r = 0; r < k; ++r) {
      double vr = a.v[r] - center[r];
      cross[r] += t * f[i] * vr;
      for (std::size_t c = 0; c < k; ++c) gram(r, c) += t * vr * (a.v[c] - center[c]);
    }
  }
  std::vector<double> coef;
  try {
    coef = solve(gram, cross);
  } catch (const Error&) {
    fail(ErrorCode::singular_moment, "singular moment matrix in oracle projection");
  }
  std::vector<double> out(model.atoms.size(), 0.0);
  for (std::size_t i = 0; i < model.atoms.size(); ++i)
    for (std::size_t c = 0; c < k; ++c)
      out[i] += coef[c] * (model.atoms[i].v[c] - center[c]);
  return out;
}

double limit_covariance(const DiscreteModel& model, std::size_t fi, std::size_t gi,
                        OracleFlavor flavor, std::optional<CalVariant> calibrated) {
  validate_model(model);
  require(fi < model.num_functions() && gi < model.num_functions(), ErrorCode::invalid_argument,
          "panel index out of range");

  std::size_t na = model.atoms.size();
  std::vector<double> f(na), g(na);
  for (std::size_t i = 0; i < na; ++i) {
    f[i] = model.atoms[i].f[fi];
    g[i] = model.atoms[i].f[gi];
  }

  // phase-I term on the raw functions
  double pf = 0.0, pg = 0.0, pfg = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    double pr = model.atoms[i].prob;
    pf += pr * f[i];
    pg += pr * g[i];
    pfg += pr * f[i] * g[i];
  }
  double phase1 = flavor == OracleFlavor::motion ? pfg : pfg - pf * pg;

  // stratum term on the (possibly residualized) functions
  std::vector<double> rf = f, rg = g;
  if (calibrated) {
    std::vector<double> qf = oracle_project_Q(model, f, *calibrated);
    std::vector<double> qg = oracle_project_Q(model, g, *calibrated);
    for (std::size_t i = 0; i < na; ++i) {
      rf[i] -= qf[i];
      rg[i] -= qg[i];
    }
  }
  double stratum_term = 0.0;
  for (std::size_t j = 0; j < model.p.size(); ++j) {
    double pj = model.p[j];
    if (pj >= 1.0) continue;
    double nu = 0.0, mf = 0.0, mg = 0.0, mfg = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
      if (static_cast<std::size_t>(model.atoms[i].stratum - 1) != j) continue;
      double pr = model.atoms[i].prob;
      nu += pr;
      mf += pr * rf[i];
      mg += pr * rg[i];
      mfg += pr * rf[i] * rg[i];
    }
    if (nu == 0.0) continue;
    mf /= nu;
    mg /= nu;
    mfg /= nu;
    stratum_term += nu * (1.0 - pj) / pj * (mfg - mf * mg);
  }
  return phase1 + stratum_term;
}

namespace {

double choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0.0;
  return std::exp(std::lgamma(static_cast<double>(n + 1)) -
                  std::lgamma(static_cast<double>(k + 1)) -
                  std::lgamma(static_cast<double>(n - k + 1)));
}

// pmf of MH(n*m, n, (m,...,m)) over weight vectors of length n summing to n
void enumerate_mh(std::int64_t n, std::int64_t m, double mix_prob,
                  std::vector<std::pair<std::vector<std::int64_t>, double>>& acc) {
  std::vector<std::int64_t> w(static_cast<std::size_t>(n), 0);
  double denom = choose(n * m, n);
  std::function<void(std::size_t, std::int64_t, double)> rec =
      [&](std::size_t idx, std::int64_t left, double numer) {
        if (idx + 1 == w.size()) {
          if (left > m) return;
          w[idx] = left;
          double pr = mix_prob * numer * choose(m, left) / denom;
          if (pr <= 0.0) return;
          acc.push_back({w, pr});
          return;
        }
        for (std::int64_t v = 0; v <= std::min<std::int64_t>(m, left); ++v) {
          w[idx] = v;
          rec(idx + 1, left - v, numer * choose(m, v));
        }
      };
  rec(0, n, 1.0);
}

}  // namespace

std::vector<std::pair<std::vector<std::int64_t>, double>> phase2_weight_pmf(std::int64_t N_j,
                                                                            std::int64_t n_j) {
  Phase2MixtureParams params = phase2_mixture_params(N_j, n_j);
  std::vector<std::pair<std::vector<std::int64_t>, double>> raw;
  enumerate_mh(n_j, params.k, params.s, raw);
  if (params.r != 0) enumerate_mh(n_j, params.k + 1, 1.0 - params.s, raw);

  // merge duplicate support points across the two components
  std::vector<std::pair<std::vector<std::int64_t>, double>> merged;
  for (auto& entry : raw) {
    bool found = false;
    for (auto& m : merged)
      if (m.first == entry.first) {
        m.second += entry.second;
        found = true;
        break;
      }
    if (!found) merged.push_back(std::move(entry));
  }
  return merged;
}

Phase2Enumeration enumerate_phase2_design(std::int64_t N_j, std::int64_t n_j) {
  require(N_j <= 8, ErrorCode::too_large, "exhaustive enumeration is limited to N_j <= 8");
  require(n_j >= 1 && n_j <= N_j, ErrorCode::invalid_argument, "need 1 <= n_j <= N_j");

  auto weight_pmf = phase2_weight_pmf(N_j, n_j);

  // all subsets of size n_j, uniform
  std::vector<std::vector<std::size_t>> subsets;
  std::vector<std::size_t> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (cur.size() == static_cast<std::size_t>(n_j)) {
      subsets.push_back(cur);
      return;
    }
    for (std::size_t i = start; i < static_cast<std::size_t>(N_j); ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  double subset_prob = 1.0 / static_cast<double>(subsets.size());

  // zeros inside a weight vector make distinct (subset, weights) pairs land
  // on the same full outcome, so accumulate through a map
  std::map<std::vector<std::int64_t>, double> joint;
  double m1 = 0.0, m2 = 0.0;
  for (const auto& [wvec, pr] : weight_pmf) {
    m1 += pr * static_cast<double>(wvec[0]);
    m2 += pr * static_cast<double>(wvec[0]) * static_cast<double>(wvec[0]);
    std::vector<std::int64_t> full(static_cast<std::size_t>(N_j), 0);
    for (const auto& subset : subsets) {
      std::fill(full.begin(), full.end(), 0);
      for (std::size_t k = 0; k < subset.size(); ++k) full[subset[k]] = wvec[k];
      joint[full] += subset_prob * pr;
    }
  }

  Phase2Enumeration out;
  for (auto& [weights, prob] : joint) out.outcomes.push_back({weights, prob});
  out.marginal_mean = m1;
  out.marginal_var = m2 - m1 * m1;
  return out;
}

}  // namespace tpb
