// Command-line front end for the two-phase bootstrap library. Talks to the
// shared library exclusively through the C API in twophaseboot.h.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "twophaseboot.h"

namespace {

int exit_code_for(int status) {
  switch (status) {
    case TPB_OK: return 0;
    case TPB_ERROR_INVALID_ARGUMENT: return 1;
    case TPB_ERROR_DATA:
    case TPB_ERROR_IO: return 2;
    default: return 3;
  }
}

// returns 0 and keeps going on success; otherwise prints the failure
int check(int status) {
  if (status == TPB_OK) return 0;
  std::fprintf(stderr, "tpb: %s: %s\n", tpb_status_name(status), tpb_last_error());
  return exit_code_for(status);
}

uint64_t env_seed() {
  const char* env = std::getenv("TPB_SEED");
  if (env == nullptr) return 0;
  return static_cast<uint64_t>(std::strtoull(env, nullptr, 10));
}

struct SampleHandle {
  tpb_sample* ptr = nullptr;
  ~SampleHandle() { tpb_sample_free(ptr); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bootstrap inference for two-phase stratified sampling without replacement"};
  app.require_subcommand(1);

  // ------------------------------------------------------------- simulate
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic two-phase Cox sample");
  tpb_sim_config sim_config;
  tpb_sim_config_init(&sim_config);
  std::string sim_out = "sample.csv";
  bool sim_seed_given = false;
  sim->add_option("--n", sim_config.n, "Phase-I sample size");
  sim->add_option("--theta", sim_config.theta, "True log hazard ratio");
  sim->add_option("--lambda0", sim_config.lambda0, "Constant baseline hazard");
  sim->add_option("--cens-upper", sim_config.cens_upper, "Upper censoring limit");
  sim->add_option("--sens", sim_config.sensitivity, "P(v=1 | x=1)");
  sim->add_option("--spec", sim_config.specificity, "P(v=0 | x=0)");
  sim->add_option("--prev", sim_config.exposure_prev, "Exposure prevalence");
  sim->add_option("--fraction", sim_config.phase2_fraction,
                  "Phase-II sampling fraction for the censored strata");
  sim->add_option("--seed", sim_config.seed, "RNG seed (overrides TPB_SEED)")
      ->trigger_on_parse()
      ->each([&](const std::string&) { sim_seed_given = true; });
  sim->add_option("--out", sim_out, "Output CSV path");

  // ------------------------------------------------------------------ fit
  auto* fit = app.add_subcommand("fit", "Weighted Cox fit with the plug-in variance");
  std::string fit_input, fit_out, fit_calibration = "none", fit_cal_vars = "y";
  double fit_cal_tol = 1e-9;
  fit->add_option("input", fit_input, "Sample CSV")->required();
  fit->add_option("--calibration", fit_calibration, "none, c, cc, or wcc")
      ->check(CLI::IsMember({"none", "c", "cc", "wcc"}));
  fit->add_option("--cal-vars", fit_cal_vars, "Comma-separated calibration columns");
  fit->add_option("--cal-tol", fit_cal_tol, "Calibration residual tolerance");
  fit->add_option("--out", fit_out, "Write the JSON report here instead of stdout");

  // ------------------------------------------------------------ bootstrap
  auto* boot = app.add_subcommand("bootstrap", "Two-phase product-weight bootstrap");
  tpb_boot_options boot_options;
  tpb_boot_options_init(&boot_options);
  std::string boot_input, boot_out = ".";
  std::string boot_estimator = "cox", boot_calibration = "none", boot_bcal = "none";
  std::string boot_cal_vars = "y", boot_panel = "x1";
  bool boot_seed_given = false;
  boot->add_option("input", boot_input, "Sample CSV")->required();
  boot->add_option("--B", boot_options.B, "Number of bootstrap replicates");
  boot->add_option("--seed", boot_options.seed, "RNG seed (overrides TPB_SEED)")
      ->trigger_on_parse()
      ->each([&](const std::string&) { boot_seed_given = true; });
  boot->add_option("--workers", boot_options.workers, "Concurrent replicate workers");
  boot->add_option("--estimator", boot_estimator, "cox or ipw-mean")
      ->check(CLI::IsMember({"cox", "ipw-mean"}));
  boot->add_option("--calibration", boot_calibration, "none, c, cc, or wcc")
      ->check(CLI::IsMember({"none", "c", "cc", "wcc"}));
  boot->add_option("--boot-calibration", boot_bcal, "none, bc, bcc, bsc, or bscc")
      ->check(CLI::IsMember({"none", "bc", "bcc", "bsc", "bscc"}));
  boot->add_option("--cal-vars", boot_cal_vars, "Comma-separated calibration columns");
  boot->add_option("--panel-var", boot_panel, "Column for the ipw-mean estimator");
  boot->add_option("--cal-tol", boot_options.cal_tol, "Calibration residual tolerance");
  boot->add_option("--max-failure-fraction", boot_options.max_failure_fraction,
                   "Abort when more replicates fail");
  boot->add_option("--out", boot_out, "Directory for summary.json and replicates.csv");
  std::string boot_dump;
  boot->add_option("--dump-weights", boot_dump,
                   "Also write the replicate weights (replicate,id,w1,w2,w) here");

  // ------------------------------------------------------------- validate
  auto* val = app.add_subcommand("validate", "Oracle-vs-Monte-Carlo validation suite");
  tpb_validate_options val_options;
  tpb_validate_options_init(&val_options);
  std::string val_out;
  bool val_seed_given = false;
  val->add_option("--replicates", val_options.covariance_replicates,
                  "Bootstrap replicates for the covariance checks");
  val->add_option("--pmf-draws", val_options.pmf_draws, "Draws for the pmf chi-square checks");
  val->add_option("--moment-draws", val_options.moment_draws,
                  "Draws for the phase-I moment checks");
  val->add_option("--seed", val_options.seed, "RNG seed (overrides TPB_SEED)")
      ->trigger_on_parse()
      ->each([&](const std::string&) { val_seed_given = true; });
  val->add_option("--out", val_out, "Write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (sim->parsed()) {
    if (!sim_seed_given) sim_config.seed = env_seed();
    SampleHandle sample;
    if (int rc = check(tpb_simulate(&sim_config, &sample.ptr))) return rc;
    if (int rc = check(tpb_sample_write_csv(sample.ptr, sim_out.c_str()))) return rc;
    int64_t n_units = 0, n_sampled = 0, n_events = 0;
    tpb_sample_n_units(sample.ptr, &n_units);
    tpb_sample_n_sampled(sample.ptr, &n_sampled);
    tpb_sample_n_events(sample.ptr, &n_events);
    std::printf("wrote %s: %lld units, %lld sampled at phase II, %lld events\n",
                sim_out.c_str(), static_cast<long long>(n_units),
                static_cast<long long>(n_sampled), static_cast<long long>(n_events));
    return 0;
  }

  if (fit->parsed()) {
    SampleHandle sample;
    if (int rc = check(tpb_sample_read_csv(fit_input.c_str(), &sample.ptr))) return rc;
    tpb_fit_options options;
    tpb_fit_options_init(&options);
    options.calibration = fit_calibration.c_str();
    options.cal_columns = fit_cal_vars.c_str();
    options.cal_tol = fit_cal_tol;
    tpb_fit_result* result = nullptr;
    if (int rc = check(tpb_cox_fit(sample.ptr, &options, &result))) return rc;
    int rc = 0;
    if (fit_out.empty()) {
      std::string tmp = std::filesystem::temp_directory_path() / "tpb_fit.json";
      rc = check(tpb_fit_result_write_json(result, tmp.c_str()));
      if (rc == 0) {
        if (FILE* f = std::fopen(tmp.c_str(), "r")) {
          char buf[4096];
          std::size_t got;
          while ((got = std::fread(buf, 1, sizeof(buf), f)) > 0)
            std::fwrite(buf, 1, got, stdout);
          std::fclose(f);
        }
        std::remove(tmp.c_str());
      }
    } else {
      rc = check(tpb_fit_result_write_json(result, fit_out.c_str()));
    }
    tpb_fit_result_free(result);
    return rc;
  }

  if (boot->parsed()) {
    if (!boot_seed_given) boot_options.seed = env_seed();
    SampleHandle sample;
    if (int rc = check(tpb_sample_read_csv(boot_input.c_str(), &sample.ptr))) return rc;
    boot_options.estimator = boot_estimator.c_str();
    boot_options.calibration = boot_calibration.c_str();
    boot_options.boot_calibration = boot_bcal.c_str();
    boot_options.cal_columns = boot_cal_vars.c_str();
    boot_options.panel_column = boot_panel.c_str();
    if (!boot_dump.empty()) boot_options.weight_dump_path = boot_dump.c_str();
    tpb_boot_result* result = nullptr;
    if (int rc = check(tpb_bootstrap(sample.ptr, &boot_options, &result))) return rc;

    std::error_code ec;
    std::filesystem::create_directories(boot_out, ec);
    std::string summary_path = (std::filesystem::path(boot_out) / "summary.json").string();
    std::string reps_path = (std::filesystem::path(boot_out) / "replicates.csv").string();
    int rc = check(tpb_boot_result_write_summary_json(result, summary_path.c_str()));
    if (rc == 0) rc = check(tpb_boot_result_write_replicates_csv(result, reps_path.c_str()));
    if (rc == 0) {
      int64_t failures = 0, dim = 0;
      tpb_boot_result_failures(result, &failures);
      tpb_boot_result_dim(result, &dim);
      double mean0 = 0.0;
      tpb_boot_result_mean(result, 0, &mean0);
      std::printf("wrote %s and %s (failures: %lld, boot mean[0]: %.6g)\n",
                  summary_path.c_str(), reps_path.c_str(), static_cast<long long>(failures),
                  mean0);
    }
    tpb_boot_result_free(result);
    return rc;
  }

  if (val->parsed()) {
    if (!val_seed_given) {
      uint64_t env = env_seed();
      if (env != 0) val_options.seed = env;
    }
    int all_pass = 0;
    const char* path = val_out.empty() ? nullptr : val_out.c_str();
    if (int rc = check(tpb_validate(&val_options, path, &all_pass))) return rc;
    std::printf("validation: %s\n", all_pass ? "PASS" : "FAIL");
    if (!val_out.empty()) std::printf("report: %s\n", val_out.c_str());
    return all_pass ? 0 : 3;
  }

  return 1;
}
