#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "tpb/engine.hpp"
#include "tpb/error.hpp"
#include "tpb/report.hpp"
#include "tpb/simulate.hpp"
#include "tpb/stats.hpp"

using namespace tpb;

namespace {

TwoPhaseSample small_cox_sample(std::uint64_t seed = 2) {
  CoxSimConfig config;
  config.N = 300;
  config.seed = seed;
  return generate_cox_sample(config);
}

BootstrapWeights unit_weights(const TwoPhaseSample& s) {
  BootstrapWeights w;
  w.w1.assign(s.units.size(), 1.0);
  w.w2.assign(s.units.size(), 0.0);
  for (std::size_t i = 0; i < s.units.size(); ++i) w.w2[i] = s.units[i].sampled ? 1.0 : 0.0;
  w.w = w.w2;
  return w;
}

}  // namespace

TEST_CASE("degenerate unit weights reproduce the original estimate") {
  TwoPhaseSample s = small_cox_sample();
  BootstrapPlan plan;
  plan.B = 1;
  PreparedEngine engine = prepare_engine(s, plan);
  std::vector<double> est = replicate_estimate(engine, unit_weights(s));
  REQUIRE(est.size() == 1);
  CHECK(est[0] == engine.center_plain[0]);
}

TEST_CASE("degenerate unit weights with matched calibration reproduce the calibrated estimate") {
  TwoPhaseSample s = small_cox_sample();
  BootstrapPlan plan;
  plan.B = 1;
  plan.calibration = Calibration::wcc;
  plan.boot_calibration = BootCalibration::bcc;
  PreparedEngine engine = prepare_engine(s, plan);
  std::vector<double> est = replicate_estimate(engine, unit_weights(s));
  // with W2 = 1 the bootstrap equation is the original equation
  CHECK(est[0] == doctest::Approx(engine.center_calibrated[0]).epsilon(1e-10));
}

TEST_CASE("plan validation rejects inconsistent flags") {
  TwoPhaseSample s = small_cox_sample();
  BootstrapPlan plan;
  plan.B = 0;
  CHECK_THROWS_AS(validate_plan(plan, s), Error);
  plan = BootstrapPlan{};
  plan.boot_calibration = BootCalibration::bc;  // requires calibration c
  CHECK_THROWS_AS(validate_plan(plan, s), Error);
  plan = BootstrapPlan{};
  plan.calibration = Calibration::c;
  plan.boot_calibration = BootCalibration::bscc;  // cc-side with c-side original
  CHECK_THROWS_AS(validate_plan(plan, s), Error);
  plan = BootstrapPlan{};
  plan.workers = 0;
  CHECK_THROWS_AS(validate_plan(plan, s), Error);
}

TEST_CASE("summarize: three point estimates") {
  BootstrapSummary summary;
  summary.dim = 1;
  summary.B = 3;
  summary.estimates = {{1.0}, {2.0}, {3.0}};
  summarize(summary);
  CHECK(summary.boot_mean[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(summary.boot_var(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("summarize: constant replicates give zero variance and a degenerate CI") {
  BootstrapSummary summary;
  summary.dim = 1;
  summary.B = 4;
  summary.estimates = {{2.5}, {2.5}, {2.5}, {2.5}};
  summarize(summary);
  CHECK(summary.boot_var(0, 0) == 0.0);
  CHECK(summary.ci_lower[0] == 2.5);
  CHECK(summary.ci_upper[0] == 2.5);
}

TEST_CASE("summarize: normal draws give the right lower percentile") {
  Rng rng(31415);
  BootstrapSummary summary;
  summary.dim = 1;
  summary.B = 10000;
  for (int i = 0; i < 10000; ++i) summary.estimates.push_back({rng.normal()});
  summarize(summary);
  CHECK(std::abs(summary.ci_lower[0] + 1.96) < 0.05);
  CHECK(std::abs(summary.ci_upper[0] - 1.96) < 0.05);
}

TEST_CASE("summarize rejects an all-failed run") {
  BootstrapSummary summary;
  summary.dim = 1;
  summary.B = 2;
  summary.estimates = {{}, {}};
  CHECK_THROWS_WITH_AS(summarize(summary), doctest::Contains("TooFewReplicates"), Error);
}

TEST_CASE("bootstrap summaries are deterministic and worker-count invariant") {
  TwoPhaseSample s = small_cox_sample();
  BootstrapPlan plan;
  plan.B = 40;
  plan.seed = 17;
  plan.workers = 1;
  BootstrapSummary one = run_bootstrap(s, plan);
  BootstrapSummary again = run_bootstrap(s, plan);
  plan.workers = 3;
  BootstrapSummary threaded = run_bootstrap(s, plan);

  REQUIRE(one.estimates.size() == 40);
  for (std::size_t b = 0; b < 40; ++b) {
    CHECK(one.estimates[b] == again.estimates[b]);
    CHECK(one.estimates[b] == threaded.estimates[b]);
  }
  CHECK(summary_to_json(one, plan) == summary_to_json(threaded, plan));
}

TEST_CASE("ipw-mean estimator: phase-2-only weights give exactly one for the constant") {
  TwoPhaseSample s = tpb_test::make_sample({{10, 3}, {9, 3}});
  BootstrapPlan plan;
  plan.B = 200;
  plan.estimator = EngineEstimator::ipw_mean;
  plan.panel_column = "const";
  plan.seed = 4;
  PreparedEngine engine = prepare_engine(s, plan);
  DesignIndex idx = build_index(s);
  for (int b = 0; b < 200; ++b) {
    Rng r2 = derive_substream(4, static_cast<std::uint64_t>(b), 2);
    BootstrapWeights w;
    w.w1.assign(s.units.size(), 1.0);
    w.w2 = phase2_weights(s, idx, r2);
    w.w = w.w2;
    CHECK(replicate_estimate(engine, w)[0] == 1.0);
  }
  // full product weights have mean one across replicates
  BootstrapSummary summary = run_bootstrap(s, plan);
  double se = summary.boot_se[0] / std::sqrt(200.0);
  CHECK(std::abs(summary.boot_mean[0] - 1.0) < 3.0 * se);
}

TEST_CASE("failure policy: losing all events fails the run loudly") {
  // one event in a size-6 stratum at fraction 1/2: many replicates zero it out
  TwoPhaseSample s = tpb_test::make_sample({{6, 3}});
  for (std::size_t i = 0; i < 6; ++i) {
    s.units[i].y = 1.0 + static_cast<double>(i);
    s.units[i].delta = i == 0 ? 1.0 : 0.0;
  }
  BootstrapPlan plan;
  plan.B = 100;
  plan.seed = 8;
  CHECK_THROWS_WITH_AS(run_bootstrap(s, plan), doctest::Contains("NoConvergence"), Error);
}

TEST_CASE("substreams from different replicates are uncorrelated") {
  const int n = 100000;
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    Rng a = derive_substream(123, static_cast<std::uint64_t>(i), 1);
    Rng b = derive_substream(123, static_cast<std::uint64_t>(i + 1), 1);
    x[i] = a.uniform();
    y[i] = b.uniform();
  }
  double mx = mean(x), my = mean(y);
  double c = 0.0;
  for (int i = 0; i < n; ++i) c += (x[i] - mx) * (y[i] - my);
  c /= (n - 1);
  double corr = c / std::sqrt(sample_variance(x) * sample_variance(y));
  CHECK(std::abs(corr) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("fit_with_variance residualizes under calibration") {
  TwoPhaseSample s = small_cox_sample(11);
  FitReport plain = fit_with_variance(s, Calibration::none, {"y"});
  FitReport calibrated = fit_with_variance(s, Calibration::wcc, {"y"});
  CHECK(plain.fit.converged);
  CHECK(calibrated.fit.converged);
  CHECK(plain.se[0] > 0.0);
  CHECK(calibrated.se[0] > 0.0);
  // centered calibration cannot hurt: projection removes variance from the
  // stratum term, so the calibrated plug-in variance is no larger
  CHECK(calibrated.sigma(0, 0) <= plain.sigma(0, 0) * 1.2);
}

TEST_CASE("designated center follows the boot-calibration route") {
  TwoPhaseSample s = small_cox_sample();
  BootstrapPlan plan;
  plan.B = 10;
  plan.seed = 30;
  plan.calibration = Calibration::wcc;
  plan.boot_calibration = BootCalibration::bcc;
  BootstrapSummary matched = run_bootstrap(s, plan);
  CHECK(matched.center_is_calibrated);
  plan.boot_calibration = BootCalibration::bscc;
  BootstrapSummary single = run_bootstrap(s, plan);
  CHECK_FALSE(single.center_is_calibrated);
  CHECK(single.center_plain == matched.center_plain);
  CHECK(single.center_calibrated == matched.center_calibrated);
}

TEST_CASE("replicates.csv marks failures and keeps the replicate index") {
  BootstrapSummary summary;
  summary.dim = 1;
  summary.B = 3;
  summary.estimates = {{1.5}, {}, {2.5}};
  summary.failures = 1;
  std::string csv = replicates_to_csv(summary);
  CHECK(csv.find("replicate,theta_1,converged") == 0);
  CHECK(csv.find("0,1.5,1") != std::string::npos);
  CHECK(csv.find("1,,0") != std::string::npos);
  CHECK(csv.find("2,2.5,1") != std::string::npos);
}
