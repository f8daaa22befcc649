#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

#include "twophaseboot.h"

namespace {

struct Sample {
  tpb_sample* ptr = nullptr;
  ~Sample() { tpb_sample_free(ptr); }
};

Sample simulate_default(uint64_t seed) {
  tpb_sim_config config;
  tpb_sim_config_init(&config);
  config.seed = seed;
  Sample s;
  REQUIRE(tpb_simulate(&config, &s.ptr) == TPB_OK);
  return s;
}

}  // namespace

TEST_CASE("version and status names are available") {
  CHECK(tpb_version() != nullptr);
  CHECK(std::strcmp(tpb_status_name(TPB_OK), "ok") == 0);
  CHECK(tpb_status_name(TPB_ERROR_NUMERIC) != nullptr);
}

TEST_CASE("simulate, write, and read a sample through the C API") {
  Sample s = simulate_default(3);
  int64_t n = 0, strata = 0, sampled = 0, events = 0;
  CHECK(tpb_sample_n_units(s.ptr, &n) == TPB_OK);
  CHECK(tpb_sample_n_strata(s.ptr, &strata) == TPB_OK);
  CHECK(tpb_sample_n_sampled(s.ptr, &sampled) == TPB_OK);
  CHECK(tpb_sample_n_events(s.ptr, &events) == TPB_OK);
  CHECK(n == 400);
  CHECK(strata == 3);
  CHECK(sampled > 100);
  CHECK(events > 10);
  CHECK(tpb_sample_validate(s.ptr) == TPB_OK);

  const char* path = "capi_sample.csv";
  REQUIRE(tpb_sample_write_csv(s.ptr, path) == TPB_OK);
  Sample back;
  REQUIRE(tpb_sample_read_csv(path, &back.ptr) == TPB_OK);
  int64_t n2 = 0;
  CHECK(tpb_sample_n_units(back.ptr, &n2) == TPB_OK);
  CHECK(n2 == n);
  std::remove(path);
}

TEST_CASE("missing files map to the IO status") {
  tpb_sample* out = nullptr;
  int rc = tpb_sample_read_csv("no_such_file_anywhere.csv", &out);
  CHECK(rc == TPB_ERROR_IO);
  CHECK(std::strlen(tpb_last_error()) > 0);
  CHECK(out == nullptr);
}

TEST_CASE("null arguments map to the invalid-argument status") {
  CHECK(tpb_sample_read_csv(nullptr, nullptr) == TPB_ERROR_INVALID_ARGUMENT);
  CHECK(tpb_simulate(nullptr, nullptr) == TPB_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("invalid simulation config is rejected") {
  tpb_sim_config config;
  tpb_sim_config_init(&config);
  config.lambda0 = -1.0;
  tpb_sample* out = nullptr;
  CHECK(tpb_simulate(&config, &out) == TPB_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("cox fit through the C API") {
  Sample s = simulate_default(3);
  tpb_fit_options options;
  tpb_fit_options_init(&options);
  tpb_fit_result* fit = nullptr;
  REQUIRE(tpb_cox_fit(s.ptr, &options, &fit) == TPB_OK);
  int64_t dim = 0;
  CHECK(tpb_fit_result_dim(fit, &dim) == TPB_OK);
  CHECK(dim == 1);
  double theta = 0.0, se = 0.0;
  int converged = 0;
  CHECK(tpb_fit_result_theta(fit, 0, &theta) == TPB_OK);
  CHECK(tpb_fit_result_se(fit, 0, &se) == TPB_OK);
  CHECK(tpb_fit_result_converged(fit, &converged) == TPB_OK);
  CHECK(converged == 1);
  CHECK(se > 0.0);
  CHECK(std::abs(theta) < 5.0);
  CHECK(tpb_fit_result_theta(fit, 7, &theta) == TPB_ERROR_INVALID_ARGUMENT);

  const char* path = "capi_fit.json";
  CHECK(tpb_fit_result_write_json(fit, path) == TPB_OK);
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("\"theta_hat\"") != std::string::npos);
  CHECK(text.find("\"converged\": true") != std::string::npos);
  std::remove(path);
  tpb_fit_result_free(fit);
}

TEST_CASE("calibrated fit through the C API") {
  Sample s = simulate_default(5);
  tpb_fit_options options;
  tpb_fit_options_init(&options);
  options.calibration = "wcc";
  options.cal_columns = "y";
  tpb_fit_result* fit = nullptr;
  REQUIRE(tpb_cox_fit(s.ptr, &options, &fit) == TPB_OK);
  int converged = 0;
  CHECK(tpb_fit_result_converged(fit, &converged) == TPB_OK);
  CHECK(converged == 1);
  tpb_fit_result_free(fit);

  options.calibration = "bogus";
  tpb_fit_result* bad = nullptr;
  CHECK(tpb_cox_fit(s.ptr, &options, &bad) == TPB_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("bootstrap through the C API with output files") {
  Sample s = simulate_default(3);
  tpb_boot_options options;
  tpb_boot_options_init(&options);
  options.B = 30;
  options.seed = 9;
  tpb_boot_result* result = nullptr;
  REQUIRE(tpb_bootstrap(s.ptr, &options, &result) == TPB_OK);

  int64_t dim = 0, failures = 0;
  CHECK(tpb_boot_result_dim(result, &dim) == TPB_OK);
  CHECK(dim == 1);
  CHECK(tpb_boot_result_failures(result, &failures) == TPB_OK);
  CHECK(failures == 0);
  double m = 0.0, v = 0.0, center = 0.0;
  CHECK(tpb_boot_result_mean(result, 0, &m) == TPB_OK);
  CHECK(tpb_boot_result_variance(result, 0, 0, &v) == TPB_OK);
  CHECK(tpb_boot_result_center_plain(result, 0, &center) == TPB_OK);
  CHECK(v > 0.0);
  CHECK(std::abs(m - center) < 1.0);
  double unused = 0.0;
  CHECK(tpb_boot_result_center_calibrated(result, 0, &unused) == TPB_ERROR_INVALID_ARGUMENT);

  CHECK(tpb_boot_result_write_summary_json(result, "capi_summary.json") == TPB_OK);
  CHECK(tpb_boot_result_write_replicates_csv(result, "capi_replicates.csv") == TPB_OK);
  std::ifstream in("capi_summary.json");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("\"designated_center\": \"plain\"") != std::string::npos);
  std::remove("capi_summary.json");
  std::remove("capi_replicates.csv");
  tpb_boot_result_free(result);
}

TEST_CASE("bootstrap rejects B = 0 as invalid") {
  Sample s = simulate_default(3);
  tpb_boot_options options;
  tpb_boot_options_init(&options);
  options.B = 0;
  tpb_boot_result* result = nullptr;
  CHECK(tpb_bootstrap(s.ptr, &options, &result) == TPB_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("bootstrap can dump the replicate weights") {
  Sample s = simulate_default(3);
  tpb_boot_options options;
  tpb_boot_options_init(&options);
  options.B = 3;
  options.seed = 5;
  options.weight_dump_path = "capi_weights.csv";
  tpb_boot_result* result = nullptr;
  REQUIRE(tpb_bootstrap(s.ptr, &options, &result) == TPB_OK);
  tpb_boot_result_free(result);

  std::ifstream in("capi_weights.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "replicate,id,w1,w2,w");
  int rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 3 * 400);  // one row per replicate per unit
  std::remove("capi_weights.csv");
}

TEST_CASE("calibrated bootstrap exposes both centers") {
  Sample s = simulate_default(3);
  tpb_boot_options options;
  tpb_boot_options_init(&options);
  options.B = 20;
  options.seed = 2;
  options.calibration = "wcc";
  options.boot_calibration = "bscc";
  tpb_boot_result* result = nullptr;
  REQUIRE(tpb_bootstrap(s.ptr, &options, &result) == TPB_OK);
  double plain = 0.0, calibrated = 0.0;
  CHECK(tpb_boot_result_center_plain(result, 0, &plain) == TPB_OK);
  CHECK(tpb_boot_result_center_calibrated(result, 0, &calibrated) == TPB_OK);
  CHECK(plain != calibrated);
  tpb_boot_result_free(result);
}
