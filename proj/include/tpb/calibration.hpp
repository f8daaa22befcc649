#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "tpb/design.hpp"
#include "tpb/linalg.hpp"
#include "tpb/panel.hpp"

namespace tpb {

// Bounded logistic calibration link: G(t) = L + (U - L) / (1 + e^{-st}),
// strictly increasing with G(0) = 1 when L + U = 2. The defaults give
// G(0) = 1 and G'(0) = 1.
struct GFunction {
  double lower = 0.0;
  double upper = 2.0;
  double slope = 2.0;

  double operator()(double t) const {
    double a = slope * t;
    if (a > 700.0) return upper;
    return lower + (upper - lower) / (1.0 + std::exp(-a));
  }
  double deriv(double t) const {
    double a = slope * t;
    if (a > 45.0 || a < -45.0) return 0.0;  // below double resolution anyway
    double e = std::exp(-a);
    double d = 1.0 + e;
    return (upper - lower) * slope * e / (d * d);
  }
};

// The six estimating equations. c / cc calibrate the original sample; the b*
// variants re-calibrate a bootstrap replicate against the phase-I average and
// the bs* ("single") variants against the IPW average.
enum class CalVariant { c, cc, bc, bcc, bsc, bscc };

const char* variant_name(CalVariant v);
bool variant_is_bootstrap(CalVariant v);
bool variant_is_centered(CalVariant v);  // cc-side (G_cc weight model)
bool variant_is_single(CalVariant v);

// Auxiliary design matrix the calibration equations act on.
// `precentered` marks columns already constructed with zero phase-I mean, in
// which case the centered variants skip the mean subtraction.
struct AuxMatrix {
  std::size_t k = 0;
  std::vector<double> values;  // N x k
  bool precentered = false;

  double at(std::size_t unit, std::size_t col) const { return values[unit * k + col]; }
  double& at(std::size_t unit, std::size_t col) { return values[unit * k + col]; }
};

AuxMatrix aux_from_columns(const TwoPhaseSample& sample,
                           const std::vector<std::string>& selectors);

// Within-stratum centered expansion: one block of columns per stratum with
// p_j < 1, each block `indicator(stratum j) * (column - stratum-j mean)`.
// Fully sampled strata carry no phase-II variability and are skipped.
AuxMatrix expand_within_stratum(const TwoPhaseSample& sample, const AuxMatrix& base);

struct CalibrationOptions {
  double tol = 1e-9;     // infinity-norm on the residual
  int max_iter = 100;
  int max_halvings = 30;
  GFunction g;
};

struct CalibrationResult {
  CalVariant variant = CalVariant::c;
  std::vector<double> alpha;
  double residual_norm = 0.0;
  int iterations = 0;
  std::vector<double> g_values;  // per-unit multiplier G(.; alpha_hat)
};

// Left minus right of the variant's estimating equation at `alpha`.
// Bootstrap variants need the phase-II weights w2 (and only those).
std::vector<double> calibration_residual(const TwoPhaseSample& sample, const AuxMatrix& aux,
                                         const std::vector<double>& alpha, CalVariant variant,
                                         const std::vector<double>* w2,
                                         const GFunction& g = {});

// Damped Newton with the exact Jacobian, started at alpha = 0.
CalibrationResult solve_calibration(const TwoPhaseSample& sample, const AuxMatrix& aux,
                                    CalVariant variant, const std::vector<double>* w2,
                                    const CalibrationOptions& options = {});

// Plug-in projection maps of the limit theory: Q_c f = E(f V^T) [E VV^T]^{-1} V
// and Q_cc f with (1/pi - 1)-weighted, centered moments. Moments use the
// phase-I empirical measure, falling back to IPW for panels observed only at
// phase II. Returns Q f per unit (defined everywhere).
FunctionPanel project_Q(const FunctionPanel& panel, const TwoPhaseSample& sample,
                        const AuxMatrix& aux, CalVariant variant);

}  // namespace tpb
