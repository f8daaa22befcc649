#include "tpb/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "tpb/error.hpp"

namespace tpb {

const char* variant_name(CalVariant v) {
  switch (v) {
    case CalVariant::c: return "c";
    case CalVariant::cc: return "cc";
    case CalVariant::bc: return "bc";
    case CalVariant::bcc: return "bcc";
    case CalVariant::bsc: return "bsc";
    case CalVariant::bscc: return "bscc";
  }
  return "?";
}

bool variant_is_bootstrap(CalVariant v) { return v != CalVariant::c && v != CalVariant::cc; }

bool variant_is_centered(CalVariant v) {
  return v == CalVariant::cc || v == CalVariant::bcc || v == CalVariant::bscc;
}

bool variant_is_single(CalVariant v) { return v == CalVariant::bsc || v == CalVariant::bscc; }

AuxMatrix aux_from_columns(const TwoPhaseSample& sample,
                           const std::vector<std::string>& selectors) {
  require(!selectors.empty(), ErrorCode::invalid_argument, "no calibration columns selected");
  for (const std::string& s : selectors)
    require(column_is_phase1(s), ErrorCode::invalid_argument,
            "calibration columns must be phase-I variables, got '" + s + "'");
  AuxMatrix aux;
  aux.k = selectors.size();
  std::size_t n = sample.units.size();
  aux.values.assign(n * aux.k, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < aux.k; ++c)
      aux.at(i, c) = unit_column_value(sample.units[i], selectors[c]);
  return aux;
}

AuxMatrix expand_within_stratum(const TwoPhaseSample& sample, const AuxMatrix& base) {
  std::size_t n = sample.units.size();
  require(base.values.size() == n * base.k && base.k >= 1, ErrorCode::dimension_mismatch,
          "auxiliary matrix does not match the sample");

  std::vector<int> partial;  // strata with p_j < 1
  for (const StratumSpec& s : sample.strata)
    if (s.n < s.N) partial.push_back(s.id);
  require(!partial.empty(), ErrorCode::invalid_argument,
          "within-stratum expansion needs at least one partially sampled stratum");

  // stratum means of every base column
  std::size_t J = sample.strata.size();
  std::vector<double> mean(J * base.k, 0.0);
  std::vector<std::int64_t> count(J, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = static_cast<std::size_t>(sample.units[i].stratum - 1);
    ++count[j];
    for (std::size_t c = 0; c < base.k; ++c) mean[j * base.k + c] += base.at(i, c);
  }
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t c = 0; c < base.k; ++c)
      mean[j * base.k + c] /= static_cast<double>(count[j]);

  AuxMatrix out;
  out.k = partial.size() * base.k;
  out.values.assign(n * out.k, 0.0);
  out.precentered = true;
  for (std::size_t i = 0; i < n; ++i) {
    int stratum = sample.units[i].stratum;
    for (std::size_t b = 0; b < partial.size(); ++b) {
      if (partial[b] != stratum) continue;
      std::size_t j = static_cast<std::size_t>(stratum - 1);
      for (std::size_t c = 0; c < base.k; ++c)
        out.at(i, b * base.k + c) = base.at(i, c) - mean[j * base.k + c];
    }
  }
  return out;
}

namespace {

// Everything an equation evaluation needs, computed once per solve.
struct EquationContext {
  const TwoPhaseSample* sample;
  const AuxMatrix* aux;
  CalVariant variant;
  const std::vector<double>* w2;
  GFunction g;
  std::size_t n, k;
  std::vector<double> inv_pi;       // per unit, xi/pi0 (0 when unsampled)
  std::vector<double> tilde_pi;     // per unit, (1 - pi0)/pi0
  std::vector<double> arg_center;   // phase-I mean of aux (0 if precentered)
  std::vector<double> outer_center; // centering of the equation's vector part
  std::vector<double> target;      // right-hand side (zeros for centered variants)

  double mult(std::size_t i) const { return w2 ? (*w2)[i] : 1.0; }

  // G-argument for unit i
  double link_arg(std::size_t i, const std::vector<double>& alpha) const {
    double t = 0.0;
    if (variant_is_centered(variant)) {
      for (std::size_t c = 0; c < k; ++c)
        t += (aux->at(i, c) - arg_center[c]) * alpha[c];
      t *= tilde_pi[i];
    } else {
      for (std::size_t c = 0; c < k; ++c) t += aux->at(i, c) * alpha[c];
    }
    return t;
  }
};

EquationContext make_context(const TwoPhaseSample& sample, const AuxMatrix& aux,
                             CalVariant variant, const std::vector<double>* w2,
                             const GFunction& g) {
  std::size_t n = sample.units.size();
  require(aux.k >= 1 && aux.values.size() == n * aux.k, ErrorCode::dimension_mismatch,
          "auxiliary matrix does not match the sample");
  if (variant_is_bootstrap(variant)) {
    require(w2 != nullptr, ErrorCode::variant_requires_weights,
            std::string("variant ") + variant_name(variant) + " needs phase-II weights");
    require(w2->size() == n, ErrorCode::dimension_mismatch, "w2 length mismatch");
  }

  EquationContext ctx;
  ctx.sample = &sample;
  ctx.aux = &aux;
  ctx.variant = variant;
  ctx.w2 = variant_is_bootstrap(variant) ? w2 : nullptr;
  ctx.g = g;
  ctx.n = n;
  ctx.k = aux.k;

  DesignProbabilities probs = design_probabilities(sample);
  ctx.inv_pi.assign(n, 0.0);
  ctx.tilde_pi.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double pi = probs.pi0_of(sample.units[i].stratum);
    if (sample.units[i].sampled) ctx.inv_pi[i] = 1.0 / pi;
    ctx.tilde_pi[i] = (1.0 - pi) / pi;
  }

  // phase-I and IPW means of the auxiliary columns
  std::vector<KahanSum> phase1(ctx.k), ipw(ctx.k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < ctx.k; ++c) {
      phase1[c].add(aux.at(i, c));
      if (ctx.inv_pi[i] != 0.0) ipw[c].add(ctx.inv_pi[i] * aux.at(i, c));
    }
  std::vector<double> mean_phase1(ctx.k), mean_ipw(ctx.k);
  for (std::size_t c = 0; c < ctx.k; ++c) {
    mean_phase1[c] = phase1[c].value() / static_cast<double>(n);
    mean_ipw[c] = ipw[c].value() / static_cast<double>(n);
  }

  ctx.arg_center.assign(ctx.k, 0.0);
  if (variant_is_centered(variant) && !aux.precentered) ctx.arg_center = mean_phase1;

  ctx.outer_center.assign(ctx.k, 0.0);
  ctx.target.assign(ctx.k, 0.0);
  switch (variant) {
    case CalVariant::c:
    case CalVariant::bc:
      ctx.target = mean_phase1;
      break;
    case CalVariant::bsc:
      ctx.target = mean_ipw;
      break;
    case CalVariant::cc:
    case CalVariant::bcc:
      ctx.outer_center = ctx.arg_center;
      break;
    case CalVariant::bscc:
      ctx.outer_center = mean_ipw;
      break;
  }
  return ctx;
}

std::vector<double> eval_residual(const EquationContext& ctx, const std::vector<double>& alpha) {
  std::vector<KahanSum> acc(ctx.k);
  for (std::size_t i = 0; i < ctx.n; ++i) {
    if (ctx.inv_pi[i] == 0.0) continue;
    double m = ctx.mult(i);
    if (m == 0.0) continue;
    double gval = ctx.g(ctx.link_arg(i, alpha));
    double w = m * gval * ctx.inv_pi[i];
    for (std::size_t c = 0; c < ctx.k; ++c)
      acc[c].add(w * (ctx.aux->at(i, c) - ctx.outer_center[c]));
  }
  std::vector<double> r(ctx.k);
  for (std::size_t c = 0; c < ctx.k; ++c)
    r[c] = acc[c].value() / static_cast<double>(ctx.n) - ctx.target[c];
  return r;
}

Matrix eval_jacobian(const EquationContext& ctx, const std::vector<double>& alpha) {
  Matrix jac(ctx.k, ctx.k);
  bool centered = variant_is_centered(ctx.variant);
  for (std::size_t i = 0; i < ctx.n; ++i) {
    if (ctx.inv_pi[i] == 0.0) continue;
    double m = ctx.mult(i);
    if (m == 0.0) continue;
    double gdot = ctx.g.deriv(ctx.link_arg(i, alpha));
    double w = m * gdot * ctx.inv_pi[i] / static_cast<double>(ctx.n);
    for (std::size_t rr = 0; rr < ctx.k; ++rr) {
      double row = ctx.aux->at(i, rr) - ctx.outer_center[rr];
      for (std::size_t cc = 0; cc < ctx.k; ++cc) {
        double col = centered
                         ? ctx.tilde_pi[i] * (ctx.aux->at(i, cc) - ctx.arg_center[cc])
                         : ctx.aux->at(i, cc);
        jac(rr, cc) += w * row * col;
      }
    }
  }
  return jac;
}

}  // namespace

std::vector<double> calibration_residual(const TwoPhaseSample& sample, const AuxMatrix& aux,
                                         const std::vector<double>& alpha, CalVariant variant,
                                         const std::vector<double>* w2, const GFunction& g) {
  require(alpha.size() == aux.k, ErrorCode::dimension_mismatch, "alpha dimension mismatch");
  EquationContext ctx = make_context(sample, aux, variant, w2, g);
  return eval_residual(ctx, alpha);
}

CalibrationResult solve_calibration(const TwoPhaseSample& sample, const AuxMatrix& aux,
                                    CalVariant variant, const std::vector<double>* w2,
                                    const CalibrationOptions& options) {
  EquationContext ctx = make_context(sample, aux, variant, w2, options.g);

  CalibrationResult result;
  result.variant = variant;
  result.alpha.assign(aux.k, 0.0);

  auto sumsq = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
  };

  std::vector<double> r = eval_residual(ctx, result.alpha);
  double rn = max_abs(r);
  double merit = sumsq(r);

  for (int iter = 0; rn > options.tol; ++iter) {
    if (iter >= options.max_iter)
      fail(ErrorCode::no_convergence,
           std::string("calibration ") + variant_name(variant) +
               " did not reach tolerance; last residual norm " + std::to_string(rn));
    Matrix jac = eval_jacobian(ctx, result.alpha);
    std::vector<double> step;
    try {
      step = solve(jac, r);
    } catch (const Error&) {
      if (iter == 0)
        fail(ErrorCode::collinear,
             "calibration columns are collinear on the sampled units");
      // a flat Jacobian away from the start means the bounded link ran out
      // of range before the equation was satisfied
      fail(ErrorCode::no_convergence,
           std::string("calibration ") + variant_name(variant) +
               " hit a flat region (equation likely infeasible); residual norm " +
               std::to_string(rn));
    }

    // backtracking on the squared residual norm; the Newton direction always
    // descends it under the exact Jacobian
    double damp = 1.0;
    bool accepted = false;
    std::vector<double> cand(aux.k), r_cand;
    for (int h = 0; h <= options.max_halvings; ++h) {
      for (std::size_t c = 0; c < aux.k; ++c) cand[c] = result.alpha[c] - damp * step[c];
      r_cand = eval_residual(ctx, cand);
      double cand_merit = sumsq(r_cand);
      if (std::isfinite(cand_merit) && cand_merit < merit) {
        merit = cand_merit;
        accepted = true;
        break;
      }
      damp *= 0.5;
    }
    if (!accepted)
      fail(ErrorCode::no_convergence,
           std::string("calibration ") + variant_name(variant) +
               " stalled (likely infeasible for the bounded link); residual norm " +
               std::to_string(rn));
    result.alpha = cand;
    r = r_cand;
    rn = max_abs(r);
    result.iterations = iter + 1;
  }

  result.residual_norm = rn;
  result.g_values.resize(ctx.n);
  for (std::size_t i = 0; i < ctx.n; ++i)
    result.g_values[i] = ctx.g(ctx.link_arg(i, result.alpha));
  return result;
}

FunctionPanel project_Q(const FunctionPanel& panel, const TwoPhaseSample& sample,
                        const AuxMatrix& aux, CalVariant variant) {
  require(variant == CalVariant::c || variant == CalVariant::cc, ErrorCode::invalid_argument,
          "projection is defined for variants c and cc");
  std::size_t n = sample.units.size();
  require(panel.values.size() == n * panel.m && panel.m >= 1, ErrorCode::dimension_mismatch,
          "panel does not match the sample");
  require(aux.values.size() == n * aux.k && aux.k >= 1, ErrorCode::dimension_mismatch,
          "auxiliary matrix does not match the sample");

  bool centered = variant == CalVariant::cc;
  DesignProbabilities probs = design_probabilities(sample);

  // regressor per unit: aux (variant c) or centered aux (variant cc)
  std::vector<double> center(aux.k, 0.0);
  if (centered && !aux.precentered) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < aux.k; ++c) center[c] += aux.at(i, c);
    for (double& v : center) v /= static_cast<double>(n);
  }
  auto reg = [&](std::size_t i, std::size_t c) { return aux.at(i, c) - (centered ? center[c] : 0.0); };
  auto tau = [&](std::size_t i) {
    if (!centered) return 1.0;
    double pi = probs.pi0_of(sample.units[i].stratum);
    return 1.0 / pi - 1.0;
  };

  // Gram matrix over all phase-I units
  Matrix gram(aux.k, aux.k);
  for (std::size_t i = 0; i < n; ++i) {
    double t = tau(i);
    if (t == 0.0) continue;
    for (std::size_t a = 0; a < aux.k; ++a)
      for (std::size_t b = 0; b < aux.k; ++b) gram(a, b) += t * reg(i, a) * reg(i, b);
  }

  // cross moments; IPW measure when the panel lives on phase II only
  bool full = panel.fully_available();
  Matrix cross(panel.m, aux.k);
  for (std::size_t i = 0; i < n; ++i) {
    if (!panel.is_available(i)) continue;
    double u = 1.0;
    if (!full) {
      if (!sample.units[i].sampled) continue;
      u = 1.0 / probs.pi0_of(sample.units[i].stratum);
    }
    double t = tau(i) * u;
    if (t == 0.0) continue;
    for (std::size_t f = 0; f < panel.m; ++f)
      for (std::size_t c = 0; c < aux.k; ++c) cross(f, c) += t * panel.at(i, f) * reg(i, c);
  }

  // coefficients: cross * gram^{-1}  (scaling by 1/N cancels)
  Matrix coef;
  try {
    coef = transpose(solve(gram, transpose(cross)));
  } catch (const Error&) {
    fail(ErrorCode::singular_moment, "singular moment matrix in projection");
  }

  // Q f is a linear function of the auxiliaries, hence defined on every unit.
  FunctionPanel out;
  out.m = panel.m;
  out.values.assign(n * panel.m, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t f = 0; f < panel.m; ++f) {
      double v = 0.0;
      for (std::size_t c = 0; c < aux.k; ++c) v += coef(f, c) * reg(i, c);
      out.values[i * panel.m + f] = v;
    }
  return out;
}

}  // namespace tpb
