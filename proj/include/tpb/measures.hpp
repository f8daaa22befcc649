#pragma once

#include <vector>

#include "tpb/calibration.hpp"
#include "tpb/design.hpp"
#include "tpb/panel.hpp"
#include "tpb/weights.hpp"

namespace tpb {

// Which bootstrap weights enter the bootstrap empirical measure.
enum class BootWeightMode { full, phase1, phase2 };

// (1/N) sum_i xi_i f(i) / pi0(i), one value per panel function.
std::vector<double> ipw_mean(const FunctionPanel& panel, const TwoPhaseSample& sample);

// Bootstrap IPW mean with the chosen weight component.
std::vector<double> boot_ipw_mean(const FunctionPanel& panel, const TwoPhaseSample& sample,
                                  const BootstrapWeights& weights, BootWeightMode mode);

// (1/N) sum_i xi_i G(V_i; alpha_hat) f(i) / pi0(i).
std::vector<double> calibrated_mean(const FunctionPanel& panel, const TwoPhaseSample& sample,
                                    const CalibrationResult& calibration);

// Bootstrap IPW empirical-process evaluations.
//
//   uncentered, no calibration   sqrt(N) (bootP - ipwP) f
//   uncentered, calibrated       sqrt(N) (bootP_cal - C) f
//   centered                     the same process applied to f - Cf
//
// where the centering measure C is the calibrated IPW measure of the original
// sample for the matched (b#) route and the plain IPW measure for the single
// (bs#) route.
struct ProcessFlavor {
  enum class Calibration { none, matched, single };
  bool centered = false;
  Calibration calibration = Calibration::none;
};

// boot_cal: the replicate's bootstrap calibration solution (g multipliers),
// required when flavor.calibration != none. orig_cal: the original sample's
// calibration, required for the matched route's centering measure.
std::vector<double> boot_process_value(const FunctionPanel& panel, const TwoPhaseSample& sample,
                                       const BootstrapWeights& weights, ProcessFlavor flavor,
                                       const CalibrationResult* boot_cal = nullptr,
                                       const CalibrationResult* orig_cal = nullptr);

}  // namespace tpb
