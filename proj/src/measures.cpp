#include "tpb/measures.hpp"

#include <cmath>

#include "tpb/error.hpp"

namespace tpb {

namespace {

void check_panel(const FunctionPanel& panel, const TwoPhaseSample& sample) {
  require(panel.m >= 1 && panel.values.size() == sample.units.size() * panel.m,
          ErrorCode::dimension_mismatch, "panel does not match the sample");
  for (std::size_t i = 0; i < sample.units.size(); ++i)
    require(panel.is_available(i) || !sample.units[i].sampled, ErrorCode::invalid_argument,
            "panel must be defined on every sampled unit");
}

// (1/N) sum_i xi_i m_i f(i) / pi0(i) for an arbitrary per-unit multiplier m.
std::vector<double> weighted_ipw_sum(const FunctionPanel& panel, const TwoPhaseSample& sample,
                                     const std::vector<double>* multiplier) {
  DesignProbabilities probs = design_probabilities(sample);
  std::vector<KahanSum> acc(panel.m);
  for (std::size_t i = 0; i < sample.units.size(); ++i) {
    const Unit& u = sample.units[i];
    if (!u.sampled) continue;
    double w = 1.0 / probs.pi0_of(u.stratum);
    if (multiplier) w *= (*multiplier)[i];
    if (w == 0.0) continue;
    for (std::size_t f = 0; f < panel.m; ++f) acc[f].add(w * panel.at(i, f));
  }
  std::vector<double> out(panel.m);
  for (std::size_t f = 0; f < panel.m; ++f)
    out[f] = acc[f].value() / static_cast<double>(sample.units.size());
  return out;
}

}  // namespace

std::vector<double> ipw_mean(const FunctionPanel& panel, const TwoPhaseSample& sample) {
  check_panel(panel, sample);
  return weighted_ipw_sum(panel, sample, nullptr);
}

std::vector<double> boot_ipw_mean(const FunctionPanel& panel, const TwoPhaseSample& sample,
                                  const BootstrapWeights& weights, BootWeightMode mode) {
  check_panel(panel, sample);
  const std::vector<double>* w = nullptr;
  switch (mode) {
    case BootWeightMode::full: w = &weights.w; break;
    case BootWeightMode::phase1: w = &weights.w1; break;
    case BootWeightMode::phase2: w = &weights.w2; break;
  }
  require(w->size() == sample.units.size(), ErrorCode::dimension_mismatch,
          "weights do not match the sample");
  return weighted_ipw_sum(panel, sample, w);
}

std::vector<double> calibrated_mean(const FunctionPanel& panel, const TwoPhaseSample& sample,
                                    const CalibrationResult& calibration) {
  check_panel(panel, sample);
  require(calibration.g_values.size() == sample.units.size(), ErrorCode::dimension_mismatch,
          "calibration result does not match the sample");
  return weighted_ipw_sum(panel, sample, &calibration.g_values);
}

std::vector<double> boot_process_value(const FunctionPanel& panel, const TwoPhaseSample& sample,
                                       const BootstrapWeights& weights, ProcessFlavor flavor,
                                       const CalibrationResult* boot_cal,
                                       const CalibrationResult* orig_cal) {
  check_panel(panel, sample);
  std::size_t n = sample.units.size();
  double root_n = std::sqrt(static_cast<double>(n));

  bool calibrated = flavor.calibration != ProcessFlavor::Calibration::none;
  if (calibrated) {
    require(boot_cal != nullptr, ErrorCode::invalid_argument,
            "calibrated flavors need the replicate's bootstrap calibration");
    bool needs_orig = flavor.calibration == ProcessFlavor::Calibration::matched || flavor.centered;
    if (needs_orig)
      require(orig_cal != nullptr, ErrorCode::invalid_argument,
              "this flavor centers at the original calibrated measure");
  }

  // bootstrap measure: product weights, times the replicate's g when calibrated
  std::vector<double> boot_mult = weights.w;
  require(boot_mult.size() == n, ErrorCode::dimension_mismatch, "weights do not match the sample");
  if (calibrated)
    for (std::size_t i = 0; i < n; ++i) boot_mult[i] *= boot_cal->g_values[i];

  std::vector<double> boot_f = weighted_ipw_sum(panel, sample, &boot_mult);

  // centering measure
  std::vector<double> center_f;
  if (flavor.calibration == ProcessFlavor::Calibration::matched) {
    center_f = weighted_ipw_sum(panel, sample, &orig_cal->g_values);
  } else {
    center_f = weighted_ipw_sum(panel, sample, nullptr);  // plain IPW
  }

  std::vector<double> out(panel.m);
  for (std::size_t f = 0; f < panel.m; ++f) out[f] = root_n * (boot_f[f] - center_f[f]);

  if (flavor.centered) {
    // apply the process to f - cf where cf is the (calibrated) IPW mean of f:
    // subtract cf times the process value at the constant 1
    FunctionPanel ones = FunctionPanel::constant(n, 1.0);
    std::vector<double> boot_1 = weighted_ipw_sum(ones, sample, &boot_mult);
    std::vector<double> center_1;
    std::vector<double> scalar_f;
    if (calibrated) {
      center_1 = flavor.calibration == ProcessFlavor::Calibration::matched
                     ? weighted_ipw_sum(ones, sample, &orig_cal->g_values)
                     : weighted_ipw_sum(ones, sample, nullptr);
      scalar_f = weighted_ipw_sum(panel, sample, &orig_cal->g_values);
    } else {
      center_1 = weighted_ipw_sum(ones, sample, nullptr);
      scalar_f = center_f;
    }
    double process_at_one = root_n * (boot_1[0] - center_1[0]);
    for (std::size_t f = 0; f < panel.m; ++f) out[f] -= scalar_f[f] * process_at_one;
  }
  return out;
}

}  // namespace tpb
