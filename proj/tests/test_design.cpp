#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "tpb/design.hpp"
#include "tpb/error.hpp"

using namespace tpb;
using tpb_test::make_sample;

TEST_CASE("validate_sample accepts a full census") {
  TwoPhaseSample s = make_sample({{3, 3}});
  CHECK_NOTHROW(validate_sample(s));
}

TEST_CASE("validate_sample flags a sampled unit without payload") {
  TwoPhaseSample s = make_sample({{3, 3}});
  s.units[1].x.clear();
  CHECK_THROWS_WITH_AS(validate_sample(s), doctest::Contains("MissingPayload"), Error);
}

TEST_CASE("validate_sample flags an unsampled unit with payload") {
  TwoPhaseSample s = make_sample({{4, 2}});
  s.units[3].x = {1.0};
  CHECK_THROWS_WITH_AS(validate_sample(s), doctest::Contains("MissingPayload"), Error);
}

TEST_CASE("validate_sample flags stratum count mismatches") {
  TwoPhaseSample s = make_sample({{4, 2}});
  s.strata[0].n = 3;  // three declared, two actually sampled
  CHECK_THROWS_WITH_AS(validate_sample(s), doctest::Contains("StratumCountMismatch"), Error);

  TwoPhaseSample t = make_sample({{4, 2}});
  t.strata[0].N = 5;
  CHECK_THROWS_WITH_AS(validate_sample(t), doctest::Contains("StratumCountMismatch"), Error);
}

TEST_CASE("validate_sample flags an empty stratum") {
  TwoPhaseSample s = make_sample({{4, 2}});
  s.strata[0].N = 0;
  s.strata[0].n = 0;
  CHECK_THROWS_AS(validate_sample(s), Error);
}

TEST_CASE("design probabilities are exact ratios") {
  TwoPhaseSample s = make_sample({{10, 3}});
  DesignProbabilities p = design_probabilities(s);
  CHECK(p.pi0[0] == 0.3);
  CHECK(p.nu_hat[0] == 1.0);
}

TEST_CASE("design probabilities reproduce the three-stratum study sizes") {
  // strata sizes 31/181/188 with phase-II counts 31/54/57
  TwoPhaseSample s = make_sample({{31, 31}, {181, 54}, {188, 57}});
  DesignProbabilities p = design_probabilities(s);
  CHECK(p.pi0[0] == 1.0);
  CHECK(p.pi0[1] == doctest::Approx(0.298).epsilon(0.01));
  CHECK(p.pi0[2] == doctest::Approx(0.303).epsilon(0.01));
  CHECK(p.nu_hat[0] + p.nu_hat[1] + p.nu_hat[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("census stratum has pi0 = 1") {
  TwoPhaseSample s = make_sample({{5, 5}});
  DesignProbabilities p = design_probabilities(s);
  CHECK(p.pi0[0] == 1.0);
  CHECK(p.nu_hat[0] == 1.0);
}

TEST_CASE("indicator sampling: census fraction selects everyone") {
  Rng rng(1);
  auto masks = sample_phase2_indicators({7}, {1.0}, rng);
  std::int64_t total = 0;
  for (char m : masks[0]) total += m;
  CHECK(total == 7);
}

TEST_CASE("indicator sampling: floor(.3 * 181) = 54") {
  Rng rng(1);
  auto masks = sample_phase2_indicators({181}, {0.3}, rng);
  std::int64_t total = 0;
  for (char m : masks[0]) total += m;
  CHECK(total == 54);
}

TEST_CASE("per-stratum indicator sums are exact on every draw") {
  Rng rng(9);
  for (int rep = 0; rep < 200; ++rep) {
    auto masks = sample_phase2_indicators({11, 6}, {0.4, 0.5}, rng);
    std::int64_t s0 = 0, s1 = 0;
    for (char m : masks[0]) s0 += m;
    for (char m : masks[1]) s1 += m;
    CHECK(s0 == 4);  // floor(.4 * 11)
    CHECK(s1 == 3);
  }
}

TEST_CASE("inclusion frequency matches n/N under SRSWOR") {
  // exact inclusion probability 2/5 (verified by the C(5,2) = 10 subsets)
  Rng rng(31);
  const int draws = 10000;
  std::vector<int> hits(5, 0);
  for (int d = 0; d < draws; ++d) {
    std::vector<char> mask = srswor_mask(5, 2, rng);
    for (int i = 0; i < 5; ++i) hits[static_cast<std::size_t>(i)] += mask[static_cast<std::size_t>(i)];
  }
  double se = std::sqrt(0.4 * 0.6 / draws);
  for (int h : hits) CHECK(std::abs(h / static_cast<double>(draws) - 0.4) < 3.0 * se);
}

TEST_CASE("fraction must stay in (0,1]") {
  Rng rng(3);
  CHECK_THROWS_AS(sample_phase2_indicators({10}, {0.0}, rng), Error);
  CHECK_THROWS_AS(sample_phase2_indicators({10}, {1.2}, rng), Error);
}

TEST_CASE("ipw base weights invert the sampling probabilities") {
  TwoPhaseSample s = make_sample({{2, 2}, {2, 1}});
  std::vector<double> w = ipw_base_weights(s);
  CHECK(w[0] == 1.0);
  CHECK(w[1] == 1.0);
  CHECK(w[2] == 2.0);
  CHECK(w[3] == 0.0);
}
