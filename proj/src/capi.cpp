#include "twophaseboot.h"

#include <cstring>
#include <sstream>
#include <string>

#include "tpb/csv.hpp"
#include "tpb/engine.hpp"
#include "tpb/error.hpp"
#include "tpb/report.hpp"
#include "tpb/simulate.hpp"
#include "tpb/validate.hpp"

namespace {

thread_local std::string g_last_error;

int set_error(const tpb::Error& e) {
  g_last_error = e.what();
  switch (e.code()) {
    case tpb::ErrorCode::invalid_argument:
    case tpb::ErrorCode::variant_requires_weights:
    case tpb::ErrorCode::too_large:
      return TPB_ERROR_INVALID_ARGUMENT;
    case tpb::ErrorCode::io:
      return TPB_ERROR_IO;
    case tpb::ErrorCode::stratum_count_mismatch:
    case tpb::ErrorCode::missing_payload:
    case tpb::ErrorCode::empty_stratum:
    case tpb::ErrorCode::degenerate_stratum:
    case tpb::ErrorCode::dimension_mismatch:
      return TPB_ERROR_DATA;
    case tpb::ErrorCode::collinear:
    case tpb::ErrorCode::singular_jacobian:
    case tpb::ErrorCode::singular_moment:
    case tpb::ErrorCode::singular_information:
    case tpb::ErrorCode::no_convergence:
    case tpb::ErrorCode::no_events:
    case tpb::ErrorCode::separation_detected:
    case tpb::ErrorCode::too_few_replicates:
      return TPB_ERROR_NUMERIC;
    case tpb::ErrorCode::internal:
      return TPB_ERROR_INTERNAL;
  }
  return TPB_ERROR_INTERNAL;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return TPB_OK;
  } catch (const tpb::Error& e) {
    return set_error(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TPB_ERROR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return TPB_ERROR_INTERNAL;
  }
}

int require_arg(bool ok, const char* message) {
  if (ok) return TPB_OK;
  g_last_error = message;
  return TPB_ERROR_INVALID_ARGUMENT;
}

std::vector<std::string> split_commas(const char* text) {
  std::vector<std::string> out;
  if (text == nullptr) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

tpb::Calibration parse_calibration(const char* name) {
  std::string s = name == nullptr ? "none" : name;
  if (s == "none") return tpb::Calibration::none;
  if (s == "c") return tpb::Calibration::c;
  if (s == "cc") return tpb::Calibration::cc;
  if (s == "wcc") return tpb::Calibration::wcc;
  tpb::fail(tpb::ErrorCode::invalid_argument, "unknown calibration '" + s + "'");
}

tpb::BootCalibration parse_boot_calibration(const char* name) {
  std::string s = name == nullptr ? "none" : name;
  if (s == "none") return tpb::BootCalibration::none;
  if (s == "bc") return tpb::BootCalibration::bc;
  if (s == "bcc") return tpb::BootCalibration::bcc;
  if (s == "bsc") return tpb::BootCalibration::bsc;
  if (s == "bscc") return tpb::BootCalibration::bscc;
  tpb::fail(tpb::ErrorCode::invalid_argument, "unknown boot-calibration '" + s + "'");
}

tpb::EngineEstimator parse_estimator(const char* name) {
  std::string s = name == nullptr ? "cox" : name;
  if (s == "cox") return tpb::EngineEstimator::cox;
  if (s == "ipw-mean") return tpb::EngineEstimator::ipw_mean;
  tpb::fail(tpb::ErrorCode::invalid_argument, "unknown estimator '" + s + "'");
}

}  // namespace

struct tpb_sample {
  tpb::TwoPhaseSample data;
};

struct tpb_fit_result {
  tpb::FitReport report;
};

struct tpb_boot_result {
  tpb::BootstrapSummary summary;
  tpb::BootstrapPlan plan;
};

extern "C" {

const char* tpb_version(void) { return "1.0.0"; }

const char* tpb_status_name(int status) {
  switch (status) {
    case TPB_OK: return "ok";
    case TPB_ERROR_INVALID_ARGUMENT: return "invalid argument";
    case TPB_ERROR_DATA: return "data error";
    case TPB_ERROR_NUMERIC: return "numerical failure";
    case TPB_ERROR_IO: return "io error";
    case TPB_ERROR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* tpb_last_error(void) { return g_last_error.c_str(); }

int tpb_sample_read_csv(const char* path, tpb_sample** out) {
  if (int rc = require_arg(path && out, "path and out required")) return rc;
  return guarded([&] {
    auto* handle = new tpb_sample{tpb::read_sample_csv(path)};
    *out = handle;
  });
}

int tpb_sample_write_csv(const tpb_sample* sample, const char* path) {
  if (int rc = require_arg(sample && path, "sample and path required")) return rc;
  return guarded([&] { tpb::write_sample_csv(sample->data, path); });
}

int tpb_sample_validate(const tpb_sample* sample) {
  if (int rc = require_arg(sample != nullptr, "sample required")) return rc;
  return guarded([&] { tpb::validate_sample(sample->data); });
}

void tpb_sample_free(tpb_sample* sample) { delete sample; }

int tpb_sample_n_units(const tpb_sample* sample, int64_t* out) {
  if (int rc = require_arg(sample && out, "sample and out required")) return rc;
  *out = static_cast<int64_t>(sample->data.units.size());
  return TPB_OK;
}

int tpb_sample_n_strata(const tpb_sample* sample, int64_t* out) {
  if (int rc = require_arg(sample && out, "sample and out required")) return rc;
  *out = static_cast<int64_t>(sample->data.strata.size());
  return TPB_OK;
}

int tpb_sample_n_sampled(const tpb_sample* sample, int64_t* out) {
  if (int rc = require_arg(sample && out, "sample and out required")) return rc;
  int64_t n = 0;
  for (const tpb::Unit& u : sample->data.units) n += u.sampled ? 1 : 0;
  *out = n;
  return TPB_OK;
}

int tpb_sample_n_events(const tpb_sample* sample, int64_t* out) {
  if (int rc = require_arg(sample && out, "sample and out required")) return rc;
  int64_t n = 0;
  for (const tpb::Unit& u : sample->data.units) n += u.delta == 1.0 ? 1 : 0;
  *out = n;
  return TPB_OK;
}

void tpb_sim_config_init(tpb_sim_config* config) {
  if (config == nullptr) return;
  tpb::CoxSimConfig defaults;
  config->n = defaults.N;
  config->theta = defaults.theta;
  config->lambda0 = defaults.lambda0;
  config->cens_upper = defaults.cens_upper;
  config->sensitivity = defaults.sensitivity;
  config->specificity = defaults.specificity;
  config->exposure_prev = defaults.exposure_prev;
  config->phase2_fraction = defaults.phase2_fraction;
  config->seed = defaults.seed;
}

int tpb_simulate(const tpb_sim_config* config, tpb_sample** out) {
  if (int rc = require_arg(config && out, "config and out required")) return rc;
  return guarded([&] {
    tpb::CoxSimConfig cfg;
    cfg.N = config->n;
    cfg.theta = config->theta;
    cfg.lambda0 = config->lambda0;
    cfg.cens_upper = config->cens_upper;
    cfg.sensitivity = config->sensitivity;
    cfg.specificity = config->specificity;
    cfg.exposure_prev = config->exposure_prev;
    cfg.phase2_fraction = config->phase2_fraction;
    cfg.seed = config->seed;
    *out = new tpb_sample{tpb::generate_cox_sample(cfg)};
  });
}

void tpb_fit_options_init(tpb_fit_options* options) {
  if (options == nullptr) return;
  options->calibration = "none";
  options->cal_columns = "y";
  options->cal_tol = 1e-9;
  options->grad_tol = 1e-8;
  options->max_iter = 60;
}

int tpb_cox_fit(const tpb_sample* sample, const tpb_fit_options* options, tpb_fit_result** out) {
  if (int rc = require_arg(sample && out, "sample and out required")) return rc;
  return guarded([&] {
    tpb_fit_options defaults;
    tpb_fit_options_init(&defaults);
    const tpb_fit_options* opt = options ? options : &defaults;

    tpb::CoxOptions cox;
    cox.grad_tol = opt->grad_tol;
    cox.max_iter = opt->max_iter;
    tpb::FitReport report =
        tpb::fit_with_variance(sample->data, parse_calibration(opt->calibration),
                               split_commas(opt->cal_columns), cox, opt->cal_tol);
    *out = new tpb_fit_result{std::move(report)};
  });
}

void tpb_fit_result_free(tpb_fit_result* result) { delete result; }

int tpb_fit_result_dim(const tpb_fit_result* result, int64_t* out) {
  if (int rc = require_arg(result && out, "result and out required")) return rc;
  *out = static_cast<int64_t>(result->report.fit.theta.size());
  return TPB_OK;
}

int tpb_fit_result_theta(const tpb_fit_result* result, int64_t index, double* out) {
  if (int rc = require_arg(result && out, "result and out required")) return rc;
  if (int rc = require_arg(index >= 0 &&
                               index < static_cast<int64_t>(result->report.fit.theta.size()),
                           "index out of range"))
    return rc;
  *out = result->report.fit.theta[static_cast<std::size_t>(index)];
  return TPB_OK;
}

int tpb_fit_result_se(const tpb_fit_result* result, int64_t index, double* out) {
  if (int rc = require_arg(result && out, "result and out required")) return rc;
  if (int rc = require_arg(index >= 0 && index < static_cast<int64_t>(result->report.se.size()),
                           "index out of range"))
    return rc;
  *out = result->report.se[static_cast<std::size_t>(index)];
  return TPB_OK;
}

int tpb_fit_result_converged(const tpb_fit_result* result, int* out) {
  if (int rc = require_arg(result && out, "result and out required")) return rc;
  *out = result->report.fit.converged ? 1 : 0;
  return TPB_OK;
}

int tpb_fit_result_n_events(const tpb_fit_result* result, int64_t* out) {
  if (int rc = require_arg(result && out, "result and out required")) return rc;
  *out = result->report.fit.n_events;
  return TPB_OK;
}

int tpb_fit_result_write_json(const tpb_fit_result* result, const char* path) {
  if (int rc = require_arg(result && path, "result and path required")) return rc;
  return guarded([&] { tpb::write_text_file(path, tpb::fit_report_to_json(result->report)); });
}

void tpb_boot_options_init(tpb_boot_options* options) {
  if (options == nullptr) return;
  options->B = 1000;
  options->seed = 0;
  options->workers = 1;
  options->estimator = "cox";
  options->calibration = "none";
  options->boot_calibration = "none";
  options->cal_columns = "y";
  options->panel_column = "x1";
  options->cal_tol = 1e-9;
  options->max_failure_fraction = 0.05;
  options->weight_dump_path = nullptr;
}

int tpb_bootstrap(const tpb_sample* sample, const tpb_boot_options* options,
                  tpb_boot_result** out) {
  if (int rc = require_arg(sample && out, "sample and out required")) return rc;
  return guarded([&] {
    tpb_boot_options defaults;
    tpb_boot_options_init(&defaults);
    const tpb_boot_options* opt = options ? options : &defaults;

    tpb::BootstrapPlan plan;
    plan.B = opt->B;
    plan.seed = opt->seed;
    plan.workers = opt->workers;
    plan.estimator = parse_estimator(opt->estimator);
    plan.calibration = parse_calibration(opt->calibration);
    plan.boot_calibration = parse_boot_calibration(opt->boot_calibration);
    plan.cal_columns = split_commas(opt->cal_columns);
    plan.panel_column = opt->panel_column ? opt->panel_column : "x1";
    plan.cal_tol = opt->cal_tol;
    plan.max_failure_fraction = opt->max_failure_fraction;

    auto* handle = new tpb_boot_result;
    handle->plan = plan;
    try {
      handle->summary = tpb::run_bootstrap(sample->data, plan);
      if (opt->weight_dump_path != nullptr) {
        // replicate weights are a pure function of (seed, index), so they can
        // be re-drawn in index order after the run
        tpb::WeightDumpWriter writer(opt->weight_dump_path);
        tpb::DesignIndex index = tpb::build_index(sample->data);
        for (std::int64_t b = 0; b < plan.B; ++b) {
          tpb::Rng r1 = tpb::derive_substream(plan.seed, static_cast<std::uint64_t>(b), 1);
          tpb::Rng r2 = tpb::derive_substream(plan.seed, static_cast<std::uint64_t>(b), 2);
          tpb::BootstrapWeights w = tpb::draw_bootstrap_weights(sample->data, index, r1, r2);
          writer.append(b, sample->data, w.w1, w.w2, w.w);
        }
      }
    } catch (...) {
      delete handle;
      throw;
    }
    *out = handle;
  });
}

void tpb_boot_result_free(tpb_boot_result* result) { delete result; }

int tpb_boot_result_dim(const tpb_boot_result* result, int64_t* out) {
  if (int rc = require_arg(result && out, "result and out required")) return rc;
  *out = static_cast<int64_t>(result->summary.dim);
  return TPB_OK;
}

int tpb_boot_result_failures(const tpb_boot_result* result, int64_t* out) {
  if (int rc = require_arg(result && out, "result and out required")) return rc;
  *out = result->summary.failures;
  return TPB_OK;
}

int tpb_boot_result_mean(const tpb_boot_result* result, int64_t index, double* out) {
  if (int rc = require_arg(result && out, "result and out required")) return rc;
  if (int rc = require_arg(index >= 0 &&
                               index < static_cast<int64_t>(result->summary.boot_mean.size()),
                           "index out of range"))
    return rc;
  *out = result->summary.boot_mean[static_cast<std::size_t>(index)];
  return TPB_OK;
}

int tpb_boot_result_variance(const tpb_boot_result* result, int64_t row, int64_t col,
                             double* out) {
  if (int rc = require_arg(result && out, "result and out required")) return rc;
  const tpb::Matrix& v = result->summary.boot_var;
  if (int rc = require_arg(row >= 0 && col >= 0 && row < static_cast<int64_t>(v.rows) &&
                               col < static_cast<int64_t>(v.cols),
                           "index out of range"))
    return rc;
  *out = v(static_cast<std::size_t>(row), static_cast<std::size_t>(col));
  return TPB_OK;
}

int tpb_boot_result_center_plain(const tpb_boot_result* result, int64_t index, double* out) {
  if (int rc = require_arg(result && out, "result and out required")) return rc;
  if (int rc = require_arg(index >= 0 &&
                               index < static_cast<int64_t>(result->summary.center_plain.size()),
                           "index out of range"))
    return rc;
  *out = result->summary.center_plain[static_cast<std::size_t>(index)];
  return TPB_OK;
}

int tpb_boot_result_center_calibrated(const tpb_boot_result* result, int64_t index, double* out) {
  if (int rc = require_arg(result && out, "result and out required")) return rc;
  if (int rc = require_arg(!result->summary.center_calibrated.empty(),
                           "run was not calibrated"))
    return rc;
  if (int rc = require_arg(
          index >= 0 && index < static_cast<int64_t>(result->summary.center_calibrated.size()),
          "index out of range"))
    return rc;
  *out = result->summary.center_calibrated[static_cast<std::size_t>(index)];
  return TPB_OK;
}

int tpb_boot_result_write_summary_json(const tpb_boot_result* result, const char* path) {
  if (int rc = require_arg(result && path, "result and path required")) return rc;
  return guarded([&] {
    tpb::write_text_file(path, tpb::summary_to_json(result->summary, result->plan));
  });
}

int tpb_boot_result_write_replicates_csv(const tpb_boot_result* result, const char* path) {
  if (int rc = require_arg(result && path, "result and path required")) return rc;
  return guarded([&] { tpb::write_text_file(path, tpb::replicates_to_csv(result->summary)); });
}

void tpb_validate_options_init(tpb_validate_options* options) {
  if (options == nullptr) return;
  tpb::ValidationOptions defaults;
  options->covariance_replicates = defaults.covariance_replicates;
  options->pmf_draws = defaults.pmf_draws;
  options->moment_draws = defaults.moment_draws;
  options->seed = defaults.seed;
}

int tpb_validate(const tpb_validate_options* options, const char* report_path, int* all_pass) {
  if (int rc = require_arg(all_pass != nullptr, "all_pass required")) return rc;
  return guarded([&] {
    tpb::ValidationOptions opt;
    if (options != nullptr) {
      opt.covariance_replicates = options->covariance_replicates;
      opt.pmf_draws = options->pmf_draws;
      opt.moment_draws = options->moment_draws;
      opt.seed = options->seed;
    }
    tpb::ValidationReport report = tpb::run_validation(opt);
    if (report_path != nullptr)
      tpb::write_text_file(report_path, tpb::validation_report_to_json(report));
    *all_pass = report.all_pass ? 1 : 0;
  });
}

}  // extern "C"
