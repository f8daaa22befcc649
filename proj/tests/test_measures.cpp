#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "tpb/error.hpp"
#include "tpb/measures.hpp"
#include "tpb/stats.hpp"

using namespace tpb;
using tpb_test::make_sample;

namespace {

BootstrapWeights unit_weights(const TwoPhaseSample& s) {
  BootstrapWeights w;
  w.w1.assign(s.units.size(), 1.0);
  w.w2.assign(s.units.size(), 0.0);
  for (std::size_t i = 0; i < s.units.size(); ++i) w.w2[i] = s.units[i].sampled ? 1.0 : 0.0;
  w.w = w.w2;
  return w;
}

}  // namespace

TEST_CASE("ipw mean on a census is the sample mean") {
  TwoPhaseSample s = make_sample({{4, 4}});
  FunctionPanel f;
  f.m = 1;
  f.values = {1.0, 2.0, 3.0, 4.0};
  CHECK(ipw_mean(f, s)[0] == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("ipw mean of the constant one is exactly one") {
  TwoPhaseSample s = make_sample({{5, 2}, {7, 3}, {4, 4}});
  FunctionPanel ones = FunctionPanel::constant(s.units.size(), 1.0);
  CHECK(ipw_mean(ones, s)[0] == 1.0);
}

TEST_CASE("ipw mean matches the hand-enumerated two-strata toy") {
  // strata (2,2) and (2,1); values 1,2,3,4 with unit 3 sampled from stratum 2
  TwoPhaseSample s = make_sample({{2, 2}, {2, 1}});
  FunctionPanel f;
  f.m = 1;
  f.values = {1.0, 2.0, 3.0, 4.0};
  CHECK(ipw_mean(f, s)[0] == doctest::Approx(2.25).epsilon(1e-15));
}

TEST_CASE("ipw mean is linear in the panel") {
  TwoPhaseSample s = make_sample({{6, 2}, {5, 3}});
  FunctionPanel f;
  f.m = 3;
  std::size_t n = s.units.size();
  f.values.assign(n * 3, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    f.at(i, 0) = static_cast<double>(i) * 0.7 - 1.0;
    f.at(i, 1) = std::sin(static_cast<double>(i));
    f.at(i, 2) = 2.0 * f.at(i, 0) - 3.0 * f.at(i, 1);
  }
  std::vector<double> m = ipw_mean(f, s);
  CHECK(m[2] == doctest::Approx(2.0 * m[0] - 3.0 * m[1]).epsilon(1e-14));
}

TEST_CASE("bootstrap mean with unit weights equals the ipw mean") {
  TwoPhaseSample s = make_sample({{4, 2}, {6, 3}});
  FunctionPanel f = FunctionPanel::from_column(s, "y");
  BootstrapWeights w = unit_weights(s);
  CHECK(boot_ipw_mean(f, s, w, BootWeightMode::full)[0] ==
        doctest::Approx(ipw_mean(f, s)[0]).epsilon(1e-15));
}

TEST_CASE("phase-II-only bootstrap mean of one is exact on every draw") {
  TwoPhaseSample s = make_sample({{10, 3}, {9, 3}});
  DesignIndex idx = build_index(s);
  FunctionPanel ones = FunctionPanel::constant(s.units.size(), 1.0);
  for (int rep = 0; rep < 500; ++rep) {
    Rng r1 = Rng::substream(3, static_cast<std::uint64_t>(rep), 1);
    Rng r2 = Rng::substream(3, static_cast<std::uint64_t>(rep), 2);
    BootstrapWeights w = draw_bootstrap_weights(s, idx, r1, r2);
    CHECK(boot_ipw_mean(ones, s, w, BootWeightMode::phase2)[0] == 1.0);
  }
}

TEST_CASE("bootstrap mean is centered at the ipw mean across replicates") {
  TwoPhaseSample s = make_sample({{8, 4}, {6, 3}});
  DesignIndex idx = build_index(s);
  FunctionPanel f = FunctionPanel::from_column(s, "y");
  double target = ipw_mean(f, s)[0];
  const int draws = 10000;
  std::vector<double> means;
  means.reserve(draws);
  for (int rep = 0; rep < draws; ++rep) {
    Rng r1 = Rng::substream(11, static_cast<std::uint64_t>(rep), 1);
    Rng r2 = Rng::substream(11, static_cast<std::uint64_t>(rep), 2);
    BootstrapWeights w = draw_bootstrap_weights(s, idx, r1, r2);
    means.push_back(boot_ipw_mean(f, s, w, BootWeightMode::full)[0]);
  }
  double se = std::sqrt(sample_variance(means) / draws);
  CHECK(std::abs(mean(means) - target) < 3.0 * se);
}

TEST_CASE("calibrated mean with alpha = 0 equals the ipw mean") {
  TwoPhaseSample s = make_sample({{4, 4}});  // census solves at alpha = 0
  AuxMatrix aux = aux_from_columns(s, {"v1"});
  CalibrationResult cal = solve_calibration(s, aux, CalVariant::c, nullptr);
  FunctionPanel f = FunctionPanel::from_column(s, "y");
  CHECK(calibrated_mean(f, s, cal)[0] == doctest::Approx(ipw_mean(f, s)[0]).epsilon(1e-15));
}

TEST_CASE("calibrated mean satisfies the calibration constraint") {
  TwoPhaseSample s = make_sample({{2, 2}, {4, 2}});
  std::vector<double> v = {1.0, 2.0, 1.5, 0.5, 2.5, 1.0};
  for (std::size_t i = 0; i < 6; ++i) s.units[i].v = {v[i]};
  AuxMatrix aux = aux_from_columns(s, {"v1"});
  CalibrationResult cal = solve_calibration(s, aux, CalVariant::c, nullptr);
  FunctionPanel fv = FunctionPanel::from_column(s, "v1");
  double phase1_mean = 0.0;
  for (double x : v) phase1_mean += x / 6.0;
  CHECK(calibrated_mean(fv, s, cal)[0] == doctest::Approx(phase1_mean).epsilon(1e-9));
}

TEST_CASE("centered process annihilates constants exactly") {
  TwoPhaseSample s = make_sample({{6, 2}, {5, 3}});
  DesignIndex idx = build_index(s);
  FunctionPanel f = FunctionPanel::constant(s.units.size(), 4.2);
  Rng r1(1), r2(2);
  BootstrapWeights w = draw_bootstrap_weights(s, idx, r1, r2);
  CHECK(boot_process_value(f, s, w, {true})[0] == 0.0);
}

TEST_CASE("uncentered process at a constant is the mass fluctuation") {
  TwoPhaseSample s = make_sample({{6, 2}, {5, 3}});
  DesignIndex idx = build_index(s);
  std::size_t n = s.units.size();
  double c = 4.2;
  FunctionPanel f = FunctionPanel::constant(n, c);
  FunctionPanel ones = FunctionPanel::constant(n, 1.0);
  Rng r1(1), r2(2);
  BootstrapWeights w = draw_bootstrap_weights(s, idx, r1, r2);
  double value = boot_process_value(f, s, w, {false})[0];
  double mass = boot_ipw_mean(ones, s, w, BootWeightMode::full)[0];
  double expect = c * std::sqrt(static_cast<double>(n)) * (mass - 1.0);
  CHECK(value == doctest::Approx(expect).epsilon(1e-12));
  CHECK(std::abs(value) > 0.0);  // phase-I weights do not telescope
}

TEST_CASE("centered and uncentered flavors agree on IPW-demeaned panels") {
  TwoPhaseSample s = make_sample({{6, 2}, {5, 3}});
  DesignIndex idx = build_index(s);
  FunctionPanel f = FunctionPanel::from_column(s, "y");
  double m = ipw_mean(f, s)[0];
  for (double& v : f.values) v -= m;  // now the IPW mean is ~0
  Rng r1(5), r2(6);
  BootstrapWeights w = draw_bootstrap_weights(s, idx, r1, r2);
  double uncentered = boot_process_value(f, s, w, {false})[0];
  double centered = boot_process_value(f, s, w, {true})[0];
  CHECK(uncentered == doctest::Approx(centered).epsilon(1e-10));
}

TEST_CASE("calibrated flavors require the calibration results") {
  TwoPhaseSample s = make_sample({{4, 2}});
  DesignIndex idx = build_index(s);
  FunctionPanel f = FunctionPanel::constant(s.units.size(), 1.0);
  Rng r1(1), r2(2);
  BootstrapWeights w = draw_bootstrap_weights(s, idx, r1, r2);
  CHECK_THROWS_AS(
      boot_process_value(f, s, w, {false, ProcessFlavor::Calibration::matched}, nullptr, nullptr),
      Error);
}
