#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tpb/oracle.hpp"
#include "tpb/panel.hpp"

namespace tpb {

struct ValidationCheck {
  std::string name;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;  // |observed - expected| bound (absolute or relative)
  bool relative = false;
  bool pass = false;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool all_pass = true;

  void add(ValidationCheck check);
};

struct ValidationOptions {
  std::int64_t covariance_replicates = 20000;
  std::int64_t pmf_draws = 100000;
  std::int64_t moment_draws = 1000000;
  std::uint64_t seed = 7;
  // relative tolerance at 20000 replicates; rescaled by sqrt(20000/B) when
  // fewer replicates are requested (15% at 2000, 5% at 20000)
  double covariance_rel_tol = 0.05;
  double oracle_floor = 0.01;      // skip covariance entries below this magnitude
  double pmf_min_p_value = 0.001;
  std::int64_t model_scale = 2000; // units per stratum in the fixture
};

// The fixed 4-atom, 2-stratum reference model (p = (1, 0.5)) with a
// 3-function panel: constant, and two generic functions.
DiscreteModel reference_model();

// A sample whose empirical composition matches the model exactly (atom counts
// and sampled counts proportional), so the design plug-ins equal the model
// quantities. scale = units per stratum, multiple of 4.
TwoPhaseSample reference_sample(const DiscreteModel& model, std::int64_t scale);

FunctionPanel reference_panel(const DiscreteModel& model, const TwoPhaseSample& sample);
AuxMatrix reference_aux(const DiscreteModel& model, const TwoPhaseSample& sample);

// Monte-Carlo covariances of the bootstrap processes on the reference model
// against the analytic oracle: plain and calibrated, uncentered (Brownian
// motion phase I) and centered (Brownian bridge phase I).
ValidationReport covariance_validation(const ValidationOptions& options);

// chi-square comparison of simulated (xi, W^(2)) frequencies against the
// exhaustive enumeration for one small design.
ValidationCheck pmf_chi_square_check(std::int64_t N_j, std::int64_t n_j, std::int64_t draws,
                                     std::uint64_t seed, double min_p_value);

// Phase-I weight moment checks at one sampling fraction.
std::vector<ValidationCheck> phase1_moment_checks(double fraction, std::int64_t draws,
                                                  std::uint64_t seed);

// Full suite behind the `validate` CLI subcommand.
ValidationReport run_validation(const ValidationOptions& options = {});

}  // namespace tpb
