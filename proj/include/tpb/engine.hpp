#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tpb/calibration.hpp"
#include "tpb/cox.hpp"
#include "tpb/design.hpp"
#include "tpb/linalg.hpp"
#include "tpb/weights.hpp"

namespace tpb {

enum class EngineEstimator { cox, ipw_mean };
enum class Calibration { none, c, cc, wcc };
enum class BootCalibration { none, bc, bcc, bsc, bscc };

const char* estimator_name(EngineEstimator e);
const char* calibration_name(Calibration c);
const char* boot_calibration_name(BootCalibration c);

struct BootstrapPlan {
  std::int64_t B = 1000;
  EngineEstimator estimator = EngineEstimator::cox;
  Calibration calibration = Calibration::none;
  BootCalibration boot_calibration = BootCalibration::none;
  std::vector<std::string> cal_columns = {"y"};
  std::string panel_column = "x1";  // ipw_mean estimator only
  std::uint64_t seed = 0;
  int workers = 1;
  double cal_tol = 1e-9;
  double max_failure_fraction = 0.05;
  CoxOptions cox;
};

// Flag consistency: bc/bsc pair with calibration c, bcc/bscc with cc or wcc.
void validate_plan(const BootstrapPlan& plan, const TwoPhaseSample& sample);

struct BootstrapSummary {
  std::size_t dim = 0;
  std::int64_t B = 0;
  std::int64_t failures = 0;
  std::vector<std::vector<double>> estimates;  // indexed by replicate; empty on failure
  std::vector<double> boot_mean;
  Matrix boot_var;
  std::vector<double> boot_se;
  std::vector<double> ci_lower, ci_upper;  // percentile 2.5 / 97.5
  std::vector<double> center_plain;        // original plain estimate
  std::vector<double> center_calibrated;   // original calibrated estimate (if any)
  bool center_is_calibrated = false;       // designated center per the theory
};

// Immutable per-run state shared by all replicates.
struct PreparedEngine {
  const TwoPhaseSample* sample = nullptr;
  BootstrapPlan plan;
  DesignIndex index;
  std::vector<double> base_ipw;  // xi / pi0
  AuxMatrix aux;                 // empty k when no calibration
  CalVariant cal_variant = CalVariant::c;       // original-sample variant
  CalVariant boot_variant = CalVariant::bc;     // per-replicate variant
  std::optional<CalibrationResult> orig_cal;
  std::vector<double> center_plain;
  std::vector<double> center_calibrated;
};

PreparedEngine prepare_engine(const TwoPhaseSample& sample, const BootstrapPlan& plan);

// Estimate for one replicate given its weights (exposed for tests; degenerate
// unit weights reproduce the original estimate).
std::vector<double> replicate_estimate(const PreparedEngine& engine,
                                       const BootstrapWeights& weights);

BootstrapSummary run_bootstrap(const TwoPhaseSample& sample, const BootstrapPlan& plan);

// Order-independent aggregation of the replicate estimates.
void summarize(BootstrapSummary& summary);

Rng derive_substream(std::uint64_t seed, std::uint64_t replicate, int phase);

// Original-sample fit with the plug-in variance (residualized contributions
// under calibration). Backs the `fit` CLI subcommand.
struct FitReport {
  CoxFit fit;
  Calibration calibration = Calibration::none;
  std::vector<double> se;  // sqrt(diag(sigma) / N)
  Matrix sigma;            // variance of sqrt(N)(theta - theta0)
  Matrix var_theta;        // sigma / N
};

FitReport fit_with_variance(const TwoPhaseSample& sample, Calibration calibration,
                            const std::vector<std::string>& cal_columns,
                            const CoxOptions& options = {}, double cal_tol = 1e-9);

}  // namespace tpb
