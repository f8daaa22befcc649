#include "tpb/engine.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "tpb/error.hpp"
#include "tpb/measures.hpp"
#include "tpb/stats.hpp"

namespace tpb {

const char* estimator_name(EngineEstimator e) {
  return e == EngineEstimator::cox ? "cox" : "ipw-mean";
}

const char* calibration_name(Calibration c) {
  switch (c) {
    case Calibration::none: return "none";
    case Calibration::c: return "c";
    case Calibration::cc: return "cc";
    case Calibration::wcc: return "wcc";
  }
  return "?";
}

const char* boot_calibration_name(BootCalibration c) {
  switch (c) {
    case BootCalibration::none: return "none";
    case BootCalibration::bc: return "bc";
    case BootCalibration::bcc: return "bcc";
    case BootCalibration::bsc: return "bsc";
    case BootCalibration::bscc: return "bscc";
  }
  return "?";
}

void validate_plan(const BootstrapPlan& plan, const TwoPhaseSample& sample) {
  require(plan.B >= 1, ErrorCode::invalid_argument, "B must be at least 1");
  require(plan.workers >= 1, ErrorCode::invalid_argument, "workers must be at least 1");
  require(plan.max_failure_fraction >= 0.0 && plan.max_failure_fraction <= 1.0,
          ErrorCode::invalid_argument, "max_failure_fraction must lie in [0,1]");
  require(plan.cal_tol > 0.0, ErrorCode::invalid_argument, "cal-tol must be positive");

  switch (plan.boot_calibration) {
    case BootCalibration::none:
      break;
    case BootCalibration::bc:
    case BootCalibration::bsc:
      require(plan.calibration == Calibration::c, ErrorCode::invalid_argument,
              std::string(boot_calibration_name(plan.boot_calibration)) +
                  " pairs with --calibration c");
      break;
    case BootCalibration::bcc:
    case BootCalibration::bscc:
      require(plan.calibration == Calibration::cc || plan.calibration == Calibration::wcc,
              ErrorCode::invalid_argument,
              std::string(boot_calibration_name(plan.boot_calibration)) +
                  " pairs with --calibration cc or wcc");
      break;
  }
  if (plan.calibration != Calibration::none)
    require(!plan.cal_columns.empty(), ErrorCode::invalid_argument,
            "calibration requires at least one column");
  if (plan.estimator == EngineEstimator::ipw_mean)
    require(!plan.panel_column.empty(), ErrorCode::invalid_argument,
            "ipw-mean estimator requires a panel column");
  validate_sample(sample);
}

Rng derive_substream(std::uint64_t seed, std::uint64_t replicate, int phase) {
  return Rng::substream(seed, replicate, static_cast<std::uint64_t>(phase));
}

namespace {

std::vector<double> estimate_with_weights(const PreparedEngine& engine,
                                          const std::vector<double>& effective) {
  const TwoPhaseSample& sample = *engine.sample;
  if (engine.plan.estimator == EngineEstimator::cox) {
    CoxFit fit = weighted_cox_fit(sample, effective, engine.plan.cox);
    return fit.theta;
  }
  FunctionPanel panel = FunctionPanel::from_column(sample, engine.plan.panel_column);
  KahanSum acc;
  for (std::size_t i = 0; i < sample.units.size(); ++i)
    if (effective[i] != 0.0) acc.add(effective[i] * panel.at(i, 0));
  return {acc.value() / static_cast<double>(sample.units.size())};
}

}  // namespace

PreparedEngine prepare_engine(const TwoPhaseSample& sample, const BootstrapPlan& plan) {
  validate_plan(plan, sample);

  PreparedEngine engine;
  engine.sample = &sample;
  engine.plan = plan;
  engine.index = build_index(sample);
  engine.base_ipw = ipw_base_weights(sample);

  if (plan.calibration != Calibration::none) {
    AuxMatrix base = aux_from_columns(sample, plan.cal_columns);
    if (plan.calibration == Calibration::wcc) {
      engine.aux = expand_within_stratum(sample, base);
      engine.cal_variant = CalVariant::cc;
    } else {
      engine.aux = base;
      engine.cal_variant =
          plan.calibration == Calibration::c ? CalVariant::c : CalVariant::cc;
    }
    CalibrationOptions copts;
    copts.tol = plan.cal_tol;
    engine.orig_cal = solve_calibration(sample, engine.aux, engine.cal_variant, nullptr, copts);
  }

  switch (plan.boot_calibration) {
    case BootCalibration::bc: engine.boot_variant = CalVariant::bc; break;
    case BootCalibration::bcc: engine.boot_variant = CalVariant::bcc; break;
    case BootCalibration::bsc: engine.boot_variant = CalVariant::bsc; break;
    case BootCalibration::bscc: engine.boot_variant = CalVariant::bscc; break;
    case BootCalibration::none: break;
  }

  engine.center_plain = estimate_with_weights(engine, engine.base_ipw);
  if (engine.orig_cal) {
    std::vector<double> calibrated = engine.base_ipw;
    for (std::size_t i = 0; i < calibrated.size(); ++i)
      calibrated[i] *= engine.orig_cal->g_values[i];
    engine.center_calibrated = estimate_with_weights(engine, calibrated);
  }
  return engine;
}

std::vector<double> replicate_estimate(const PreparedEngine& engine,
                                       const BootstrapWeights& weights) {
  const TwoPhaseSample& sample = *engine.sample;
  std::vector<double> effective(sample.units.size());
  for (std::size_t i = 0; i < effective.size(); ++i)
    effective[i] = engine.base_ipw[i] * weights.w[i];

  if (engine.plan.boot_calibration != BootCalibration::none) {
    CalibrationOptions copts;
    copts.tol = engine.plan.cal_tol;
    CalibrationResult boot_cal =
        solve_calibration(sample, engine.aux, engine.boot_variant, &weights.w2, copts);
    for (std::size_t i = 0; i < effective.size(); ++i)
      effective[i] *= boot_cal.g_values[i];
  }
  return estimate_with_weights(engine, effective);
}

void summarize(BootstrapSummary& summary) {
  std::size_t p = summary.dim;
  std::vector<std::vector<double>> columns(p);
  for (const auto& est : summary.estimates) {
    if (est.empty()) continue;
    for (std::size_t c = 0; c < p; ++c) columns[c].push_back(est[c]);
  }
  std::size_t successes = columns.empty() ? 0 : columns[0].size();
  require(successes >= 2, ErrorCode::too_few_replicates,
          "variance needs at least two successful replicates, have " +
              std::to_string(successes));

  summary.boot_mean.resize(p);
  summary.boot_se.resize(p);
  summary.ci_lower.resize(p);
  summary.ci_upper.resize(p);
  summary.boot_var = Matrix(p, p);
  for (std::size_t c = 0; c < p; ++c) {
    summary.boot_mean[c] = mean(columns[c]);
    summary.ci_lower[c] = quantile(columns[c], 0.025);
    summary.ci_upper[c] = quantile(columns[c], 0.975);
  }
  double denom = static_cast<double>(successes - 1);
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < p; ++b) {
      double s = 0.0;
      for (std::size_t r = 0; r < successes; ++r)
        s += (columns[a][r] - summary.boot_mean[a]) * (columns[b][r] - summary.boot_mean[b]);
      summary.boot_var(a, b) = s / denom;
    }
  for (std::size_t c = 0; c < p; ++c) summary.boot_se[c] = std::sqrt(summary.boot_var(c, c));
}

BootstrapSummary run_bootstrap(const TwoPhaseSample& sample, const BootstrapPlan& plan) {
  PreparedEngine engine = prepare_engine(sample, plan);

  BootstrapSummary summary;
  summary.B = plan.B;
  summary.dim = engine.center_plain.size();
  summary.center_plain = engine.center_plain;
  summary.center_calibrated = engine.center_calibrated;
  summary.center_is_calibrated = plan.boot_calibration == BootCalibration::bc ||
                                 plan.boot_calibration == BootCalibration::bcc;
  summary.estimates.assign(static_cast<std::size_t>(plan.B), {});

  std::atomic<std::int64_t> next{0};
  std::atomic<std::int64_t> failures{0};
  auto worker = [&]() {
    for (;;) {
      std::int64_t b = next.fetch_add(1);
      if (b >= plan.B) return;
      try {
        Rng rng1 = derive_substream(plan.seed, static_cast<std::uint64_t>(b), 1);
        Rng rng2 = derive_substream(plan.seed, static_cast<std::uint64_t>(b), 2);
        BootstrapWeights w = draw_bootstrap_weights(sample, engine.index, rng1, rng2);
        summary.estimates[static_cast<std::size_t>(b)] = replicate_estimate(engine, w);
      } catch (const std::exception&) {
        failures.fetch_add(1);
      }
    }
  };

  int workers = plan.workers;
  if (workers <= 1 || plan.B <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  summary.failures = failures.load();
  double max_failures = plan.max_failure_fraction * static_cast<double>(plan.B);
  require(static_cast<double>(summary.failures) <= max_failures, ErrorCode::no_convergence,
          std::to_string(summary.failures) + " of " + std::to_string(plan.B) +
              " replicates failed (limit " + std::to_string(max_failures) + ")");
  if (plan.B == 1) {
    // a single replicate has no variance; report the point estimate as is
    summary.boot_mean = summary.estimates[0];
    summary.ci_lower = summary.estimates[0];
    summary.ci_upper = summary.estimates[0];
    summary.boot_se.assign(summary.dim, std::numeric_limits<double>::quiet_NaN());
    summary.boot_var = Matrix(summary.dim, summary.dim,
                              std::numeric_limits<double>::quiet_NaN());
    return summary;
  }
  summarize(summary);
  return summary;
}

FitReport fit_with_variance(const TwoPhaseSample& sample, Calibration calibration,
                            const std::vector<std::string>& cal_columns,
                            const CoxOptions& options, double cal_tol) {
  validate_sample(sample);
  FitReport report;
  report.calibration = calibration;

  std::vector<double> weights = ipw_base_weights(sample);
  AuxMatrix aux;
  CalVariant variant = CalVariant::c;
  std::optional<CalibrationResult> cal;
  if (calibration != Calibration::none) {
    AuxMatrix base = aux_from_columns(sample, cal_columns);
    if (calibration == Calibration::wcc) {
      aux = expand_within_stratum(sample, base);
      variant = CalVariant::cc;
    } else {
      aux = base;
      variant = calibration == Calibration::c ? CalVariant::c : CalVariant::cc;
    }
    CalibrationOptions copts;
    copts.tol = cal_tol;
    cal = solve_calibration(sample, aux, variant, nullptr, copts);
    for (std::size_t i = 0; i < weights.size(); ++i) weights[i] *= cal->g_values[i];
  }

  report.fit = weighted_cox_fit(sample, weights, options);
  Matrix contributions = influence_contributions(report.fit, sample, weights);

  if (cal) {
    // residualize: contributions - Q_# contributions
    FunctionPanel panel;
    panel.m = contributions.cols;
    panel.values = contributions.data;
    panel.available.assign(sample.units.size(), 0);
    for (std::size_t i = 0; i < sample.units.size(); ++i)
      panel.available[i] = sample.units[i].sampled ? 1 : 0;
    FunctionPanel projected = project_Q(panel, sample, aux, variant);
    for (std::size_t i = 0; i < sample.units.size(); ++i) {
      if (!sample.units[i].sampled) continue;
      for (std::size_t c = 0; c < panel.m; ++c)
        contributions(i, c) -= projected.at(i, c);
    }
  }

  report.sigma = standard_variance(sample, contributions, report.fit.info);
  double n = static_cast<double>(sample.units.size());
  report.var_theta = scale(report.sigma, 1.0 / n);
  report.se.resize(report.sigma.rows);
  for (std::size_t c = 0; c < report.sigma.rows; ++c)
    report.se[c] = std::sqrt(report.var_theta(c, c));
  return report;
}

}  // namespace tpb
