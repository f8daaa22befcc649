#include "tpb/cox.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tpb/error.hpp"

namespace tpb {

namespace {

// Column view of the survival data restricted to units that can enter the
// partial likelihood (sampled, weight > 0), ordered by descending time so a
// single pass accumulates the risk sets.
struct CoxData {
  std::size_t p = 0;
  std::size_t N = 0;                // full phase-I size (for the 1/N scaling)
  std::vector<std::size_t> unit;    // position in sample.units
  std::vector<double> y, delta, w;
  std::vector<double> x;            // n_used x p
  std::vector<std::size_t> order;   // descending y

  double xv(std::size_t i, std::size_t c) const { return x[i * p + c]; }
};

CoxData extract(const TwoPhaseSample& sample, const std::vector<double>& weights) {
  require(weights.size() == sample.units.size(), ErrorCode::dimension_mismatch,
          "weights do not match the sample");
  CoxData d;
  d.N = sample.units.size();
  for (std::size_t i = 0; i < sample.units.size(); ++i) {
    const Unit& u = sample.units[i];
    require(weights[i] >= 0.0, ErrorCode::invalid_argument, "weights must be nonnegative");
    if (weights[i] == 0.0) continue;
    require(u.sampled, ErrorCode::invalid_argument,
            "positive weight on unsampled unit " + std::to_string(u.id));
    if (d.p == 0) d.p = u.x.size();
    d.unit.push_back(i);
    d.y.push_back(u.y);
    d.delta.push_back(u.delta);
    d.w.push_back(weights[i]);
    d.x.insert(d.x.end(), u.x.begin(), u.x.end());
  }
  require(d.p >= 1, ErrorCode::invalid_argument, "no covariates");
  bool any_event = false;
  for (std::size_t i = 0; i < d.y.size(); ++i) any_event = any_event || d.delta[i] == 1.0;
  require(any_event, ErrorCode::no_events, "no events with positive weight");

  d.order.resize(d.y.size());
  for (std::size_t i = 0; i < d.order.size(); ++i) d.order[i] = i;
  std::sort(d.order.begin(), d.order.end(), [&](std::size_t a, std::size_t b) {
    if (d.y[a] != d.y[b]) return d.y[a] > d.y[b];
    return d.unit[a] < d.unit[b];
  });
  return d;
}

// One pass over the risk sets: log-likelihood, score, and information.
void accumulate(const CoxData& d, const std::vector<double>& theta, double* loglik,
                std::vector<double>* score, Matrix* info) {
  std::size_t p = d.p;
  double ll = 0.0;
  std::vector<double> sc(p, 0.0);
  Matrix im(p, p);

  double s0 = 0.0;
  std::vector<double> s1(p, 0.0);
  Matrix s2(p, p);

  std::size_t i = 0;
  while (i < d.order.size()) {
    double t = d.y[d.order[i]];
    // everyone with y == t joins the risk set before the deaths at t count
    std::size_t start = i;
    for (; i < d.order.size() && d.y[d.order[i]] == t; ++i) {
      std::size_t r = d.order[i];
      double eta = 0.0;
      for (std::size_t c = 0; c < p; ++c) eta += theta[c] * d.xv(r, c);
      double risk = d.w[r] * std::exp(eta);
      s0 += risk;
      for (std::size_t a = 0; a < p; ++a) {
        s1[a] += risk * d.xv(r, a);
        for (std::size_t b = a; b < p; ++b) {
          double v = risk * d.xv(r, a) * d.xv(r, b);
          s2(a, b) += v;
          if (b != a) s2(b, a) += v;
        }
      }
    }
    for (std::size_t e = start; e < i; ++e) {
      std::size_t r = d.order[e];
      if (d.delta[r] != 1.0) continue;
      double eta = 0.0;
      for (std::size_t c = 0; c < p; ++c) eta += theta[c] * d.xv(r, c);
      ll += d.w[r] * (eta - std::log(s0));
      for (std::size_t a = 0; a < p; ++a) {
        double mean_a = s1[a] / s0;
        sc[a] += d.w[r] * (d.xv(r, a) - mean_a);
        for (std::size_t b = 0; b < p; ++b)
          im(a, b) += d.w[r] * (s2(a, b) / s0 - mean_a * s1[b] / s0);
      }
    }
  }
  if (loglik) *loglik = ll;
  if (score) *score = sc;
  if (info) *info = im;
}

}  // namespace

double cox_loglik(const TwoPhaseSample& sample, const std::vector<double>& weights,
                  const std::vector<double>& theta) {
  CoxData d = extract(sample, weights);
  require(theta.size() == d.p, ErrorCode::dimension_mismatch, "theta dimension mismatch");
  double ll;
  accumulate(d, theta, &ll, nullptr, nullptr);
  return ll;
}

std::vector<double> cox_score(const TwoPhaseSample& sample, const std::vector<double>& weights,
                              const std::vector<double>& theta) {
  CoxData d = extract(sample, weights);
  require(theta.size() == d.p, ErrorCode::dimension_mismatch, "theta dimension mismatch");
  std::vector<double> sc;
  accumulate(d, theta, nullptr, &sc, nullptr);
  return sc;
}

CoxFit weighted_cox_fit(const TwoPhaseSample& sample, const std::vector<double>& weights,
                        const CoxOptions& options) {
  CoxData d = extract(sample, weights);
  CoxFit fit;
  fit.theta.assign(d.p, 0.0);
  for (double del : d.delta) fit.n_events += del == 1.0 ? 1 : 0;

  double ll;
  std::vector<double> score;
  Matrix info;
  accumulate(d, fit.theta, &ll, &score, &info);

  while (max_abs(score) > options.grad_tol) {
    if (fit.iterations >= options.max_iter)
      fail(ErrorCode::no_convergence, "Cox fit did not converge; score norm " +
                                          std::to_string(max_abs(score)));
    std::vector<double> step;
    try {
      step = solve(info, score);
    } catch (const Error&) {
      fail(ErrorCode::singular_information, "singular information in Cox fit");
    }

    double damp = 1.0;
    bool accepted = false;
    std::vector<double> cand(d.p);
    double ll_cand = 0.0;
    for (int h = 0; h <= options.max_halvings; ++h) {
      for (std::size_t c = 0; c < d.p; ++c) cand[c] = fit.theta[c] + damp * step[c];
      accumulate(d, cand, &ll_cand, nullptr, nullptr);
      if (ll_cand >= ll - 1e-12 * (1.0 + std::abs(ll))) {
        accepted = true;
        break;
      }
      damp *= 0.5;
    }
    if (!accepted)
      fail(ErrorCode::no_convergence, "Cox step halving exhausted at iteration " +
                                          std::to_string(fit.iterations));
    fit.theta = cand;
    ++fit.iterations;
    require(max_abs(fit.theta) <= options.theta_bound, ErrorCode::separation_detected,
            "monotone likelihood: |theta| exceeded " + std::to_string(options.theta_bound));
    accumulate(d, fit.theta, &ll, &score, &info);
  }

  fit.converged = true;
  fit.loglik = ll;
  fit.info = scale(info, 1.0 / static_cast<double>(d.N));
  fit.baseline = breslow_baseline(sample, weights, fit.theta);
  return fit;
}

std::vector<std::pair<double, double>> breslow_baseline(const TwoPhaseSample& sample,
                                                        const std::vector<double>& weights,
                                                        const std::vector<double>& theta) {
  CoxData d = extract(sample, weights);
  require(theta.size() == d.p, ErrorCode::dimension_mismatch, "theta dimension mismatch");

  // ascending time; risk sums computed by peeling the descending ordering
  std::vector<double> risk(d.y.size());
  for (std::size_t i = 0; i < d.y.size(); ++i) {
    double eta = 0.0;
    for (std::size_t c = 0; c < d.p; ++c) eta += theta[c] * d.xv(i, c);
    risk[i] = d.w[i] * std::exp(eta);
  }

  // walk descending order accumulating s0, remembering the increment per
  // distinct event time, then accumulate in ascending time
  std::vector<std::pair<double, double>> increments;  // (time, dw / s0)
  double s0 = 0.0;
  std::size_t i = 0;
  while (i < d.order.size()) {
    double t = d.y[d.order[i]];
    double dw = 0.0;
    for (; i < d.order.size() && d.y[d.order[i]] == t; ++i) {
      std::size_t r = d.order[i];
      s0 += risk[r];
      if (d.delta[r] == 1.0) dw += d.w[r];
    }
    if (dw > 0.0) increments.push_back({t, dw / s0});
  }
  std::reverse(increments.begin(), increments.end());
  std::vector<std::pair<double, double>> steps;
  steps.reserve(increments.size());
  double cum = 0.0;
  for (const auto& [t, inc] : increments) {
    cum += inc;
    steps.push_back({t, cum});
  }
  return steps;
}

Matrix influence_contributions(const CoxFit& fit, const TwoPhaseSample& sample,
                               const std::vector<double>& weights) {
  require(fit.converged, ErrorCode::invalid_argument, "influence needs a converged fit");
  CoxData d = extract(sample, weights);
  std::size_t p = d.p;
  require(fit.theta.size() == p, ErrorCode::dimension_mismatch, "fit does not match the sample");

  std::vector<double> risk(d.y.size());
  for (std::size_t i = 0; i < d.y.size(); ++i) {
    double eta = 0.0;
    for (std::size_t c = 0; c < p; ++c) eta += fit.theta[c] * d.xv(i, c);
    risk[i] = std::exp(eta);  // unweighted relative risk
  }

  // distinct event times with s0, xbar, and the Breslow increment
  struct EventBlock {
    double t;
    double hazard_inc;          // sum of death weights / s0
    std::vector<double> xbar;   // s1 / s0
  };
  std::vector<EventBlock> events;
  {
    double s0 = 0.0;
    std::vector<double> s1(p, 0.0);
    std::size_t i = 0;
    std::vector<EventBlock> desc;
    while (i < d.order.size()) {
      double t = d.y[d.order[i]];
      double dw = 0.0;
      for (; i < d.order.size() && d.y[d.order[i]] == t; ++i) {
        std::size_t r = d.order[i];
        double wr = d.w[r] * risk[r];
        s0 += wr;
        for (std::size_t c = 0; c < p; ++c) s1[c] += wr * d.xv(r, c);
        if (d.delta[r] == 1.0) dw += d.w[r];
      }
      if (dw > 0.0) {
        EventBlock b;
        b.t = t;
        b.hazard_inc = dw / s0;
        b.xbar.resize(p);
        for (std::size_t c = 0; c < p; ++c) b.xbar[c] = s1[c] / s0;
        desc.push_back(std::move(b));
      }
    }
    events.assign(desc.rbegin(), desc.rend());  // ascending time
  }

  // cumulative A0(t) = sum dLambda, A1(t) = sum dLambda * xbar over events <= t
  std::size_t n_ev = events.size();
  std::vector<double> a0(n_ev);
  Matrix a1(n_ev, p);
  double c0 = 0.0;
  std::vector<double> c1(p, 0.0);
  for (std::size_t e = 0; e < n_ev; ++e) {
    c0 += events[e].hazard_inc;
    for (std::size_t c = 0; c < p; ++c) c1[c] += events[e].hazard_inc * events[e].xbar[c];
    a0[e] = c0;
    for (std::size_t c = 0; c < p; ++c) a1(e, c) = c1[c];
  }
  auto last_event_leq = [&](double t) -> std::ptrdiff_t {
    std::ptrdiff_t lo = 0, hi = static_cast<std::ptrdiff_t>(n_ev) - 1, ans = -1;
    while (lo <= hi) {
      std::ptrdiff_t mid = (lo + hi) / 2;
      if (events[static_cast<std::size_t>(mid)].t <= t) {
        ans = mid;
        lo = mid + 1;
      } else {
        hi = mid - 1;
      }
    }
    return ans;
  };

  Matrix info_inv;
  try {
    info_inv = inverse(fit.info);
  } catch (const Error&) {
    fail(ErrorCode::singular_information, "singular information in influence computation");
  }

  Matrix out(sample.units.size(), p);
  std::vector<double> u(p), scaled(p);
  for (std::size_t i = 0; i < d.y.size(); ++i) {
    std::fill(u.begin(), u.end(), 0.0);
    std::ptrdiff_t e = last_event_leq(d.y[i]);
    if (d.delta[i] == 1.0 && e >= 0) {
      // own-event term: x_i - xbar at the unit's event time
      const EventBlock& b = events[static_cast<std::size_t>(e)];
      for (std::size_t c = 0; c < p; ++c) u[c] += d.xv(i, c) - b.xbar[c];
    }
    if (e >= 0) {
      for (std::size_t c = 0; c < p; ++c)
        u[c] -= risk[i] * (d.xv(i, c) * a0[static_cast<std::size_t>(e)] -
                           a1(static_cast<std::size_t>(e), c));
    }
    for (std::size_t a = 0; a < p; ++a) {
      double s = 0.0;
      for (std::size_t b = 0; b < p; ++b) s += info_inv(a, b) * u[b];
      scaled[a] = s;
    }
    for (std::size_t c = 0; c < p; ++c) out(d.unit[i], c) = scaled[c];
  }
  return out;
}

Matrix standard_variance(const TwoPhaseSample& sample, const Matrix& contributions,
                         const Matrix& info) {
  std::size_t p = info.rows;
  require(contributions.rows == sample.units.size() && contributions.cols == p,
          ErrorCode::dimension_mismatch, "contributions do not match the sample");

  Matrix sigma;
  try {
    sigma = inverse(info);
  } catch (const Error&) {
    fail(ErrorCode::singular_information, "singular information in variance computation");
  }

  DesignProbabilities probs = design_probabilities(sample);
  DesignIndex index = build_index(sample);
  for (const StratumSpec& s : sample.strata) {
    double p_j = probs.pi0[s.id - 1];
    if (p_j >= 1.0) continue;  // fully sampled strata add nothing
    const auto& members = index.sampled[s.id - 1];
    if (members.size() < 2) continue;  // no within-stratum variance estimate
    std::vector<double> mean(p, 0.0);
    for (std::size_t i : members)
      for (std::size_t c = 0; c < p; ++c) mean[c] += contributions(i, c);
    for (double& m : mean) m /= static_cast<double>(members.size());
    Matrix cov(p, p);
    for (std::size_t i : members)
      for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = 0; b < p; ++b)
          cov(a, b) += (contributions(i, a) - mean[a]) * (contributions(i, b) - mean[b]);
    double denom = static_cast<double>(members.size()) - 1.0;
    double factor = probs.nu_hat[s.id - 1] * (1.0 - p_j) / p_j / denom;
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b) sigma(a, b) += factor * cov(a, b);
  }
  return sigma;
}

}  // namespace tpb
