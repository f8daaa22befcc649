#include "tpb/validate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "tpb/error.hpp"
#include "tpb/measures.hpp"
#include "tpb/stats.hpp"
#include "tpb/weights.hpp"

namespace tpb {

void ValidationReport::add(ValidationCheck check) {
  double gap = std::abs(check.observed - check.expected);
  if (check.relative) {
    double denom = std::max(std::abs(check.expected), 1e-300);
    check.pass = gap / denom <= check.tolerance;
  } else {
    check.pass = gap <= check.tolerance;
  }
  all_pass = all_pass && check.pass;
  checks.push_back(std::move(check));
}

DiscreteModel reference_model() {
  DiscreteModel model;
  model.p = {1.0, 0.5};
  //                stratum prob    v      f = (1, f2, f3)
  model.atoms.push_back({1, 0.25, {1.0}, {1.0, 0.0, 1.0}});
  model.atoms.push_back({1, 0.25, {2.0}, {1.0, 1.0, -1.0}});
  model.atoms.push_back({2, 0.25, {1.0}, {1.0, 0.0, 2.0}});
  model.atoms.push_back({2, 0.25, {3.0}, {1.0, 2.0, 0.0}});
  validate_model(model);
  return model;
}

namespace {

std::size_t atom_of_unit(const DiscreteModel& model, const Unit& unit) {
  for (std::size_t a = 0; a < model.atoms.size(); ++a) {
    const DiscreteAtom& atom = model.atoms[a];
    if (atom.stratum != unit.stratum || atom.v.size() != unit.v.size()) continue;
    bool same = true;
    for (std::size_t c = 0; c < atom.v.size(); ++c)
      same = same && std::abs(atom.v[c] - unit.v[c]) < 1e-12;
    if (same) return a;
  }
  fail(ErrorCode::invalid_argument, "unit does not match any model atom");
}

}  // namespace

TwoPhaseSample reference_sample(const DiscreteModel& model, std::int64_t scale) {
  require(scale >= 4 && scale % 4 == 0, ErrorCode::invalid_argument,
          "scale must be a positive multiple of 4");
  TwoPhaseSample sample;
  std::int64_t id = 0;

  // stratum 1: scale units, half per atom, fully sampled
  // stratum 2: scale units, half per atom, half of each atom sampled
  for (std::size_t a = 0; a < model.atoms.size(); ++a) {
    const DiscreteAtom& atom = model.atoms[a];
    std::int64_t copies = scale / 2;
    std::int64_t sampled = atom.stratum == 1 ? copies : copies / 2;
    for (std::int64_t i = 0; i < copies; ++i) {
      Unit u;
      u.id = ++id;
      u.stratum = atom.stratum;
      u.v = atom.v;
      u.sampled = i < sampled;
      if (u.sampled) u.x = {static_cast<double>(a)};
      sample.units.push_back(std::move(u));
    }
  }
  sample.strata = {{1, scale, scale}, {2, scale, scale / 2}};
  validate_sample(sample);
  return sample;
}

FunctionPanel reference_panel(const DiscreteModel& model, const TwoPhaseSample& sample) {
  FunctionPanel panel;
  panel.m = model.num_functions();
  panel.values.assign(sample.units.size() * panel.m, 0.0);
  for (std::size_t i = 0; i < sample.units.size(); ++i) {
    std::size_t a = atom_of_unit(model, sample.units[i]);
    for (std::size_t f = 0; f < panel.m; ++f) panel.at(i, f) = model.atoms[a].f[f];
  }
  return panel;
}

AuxMatrix reference_aux(const DiscreteModel& model, const TwoPhaseSample& sample) {
  AuxMatrix aux;
  aux.k = model.num_aux();
  aux.values.assign(sample.units.size() * aux.k, 0.0);
  for (std::size_t i = 0; i < sample.units.size(); ++i)
    for (std::size_t c = 0; c < aux.k; ++c) aux.at(i, c) = sample.units[i].v[c];
  return aux;
}

namespace {

struct CovAccumulator {
  std::size_t m = 0;
  std::int64_t n = 0;
  std::vector<double> sum;
  Matrix cross;

  explicit CovAccumulator(std::size_t m_) : m(m_), sum(m_, 0.0), cross(m_, m_) {}

  void add(const std::vector<double>& x) {
    ++n;
    for (std::size_t a = 0; a < m; ++a) {
      sum[a] += x[a];
      for (std::size_t b = a; b < m; ++b) cross(a, b) += x[a] * x[b];
    }
  }
  double cov(std::size_t a, std::size_t b) const {
    if (b < a) std::swap(a, b);
    double nn = static_cast<double>(n);
    double ma = sum[a] / nn, mb = sum[b] / nn;
    return (cross(a, b) - nn * ma * mb) / (nn - 1.0);
  }
};

double scaled_rel_tol(const ValidationOptions& options) {
  return options.covariance_rel_tol *
         std::sqrt(20000.0 / static_cast<double>(options.covariance_replicates));
}

void add_covariance_checks(ValidationReport& report, const std::string& label,
                           const CovAccumulator& acc, const DiscreteModel& model,
                           OracleFlavor flavor, std::optional<CalVariant> cal,
                           const ValidationOptions& options) {
  for (std::size_t a = 0; a < acc.m; ++a)
    for (std::size_t b = a; b < acc.m; ++b) {
      double expected = limit_covariance(model, a, b, flavor, cal);
      if (std::abs(expected) <= options.oracle_floor) continue;
      ValidationCheck check;
      check.name = label + " cov(f" + std::to_string(a + 1) + ",f" + std::to_string(b + 1) + ")";
      check.observed = acc.cov(a, b);
      check.expected = expected;
      check.tolerance = scaled_rel_tol(options);
      check.relative = true;
      report.add(std::move(check));
    }
}

}  // namespace

ValidationReport covariance_validation(const ValidationOptions& options) {
  DiscreteModel model = reference_model();
  TwoPhaseSample sample = reference_sample(model, options.model_scale);
  FunctionPanel panel = reference_panel(model, sample);
  AuxMatrix aux = reference_aux(model, sample);
  DesignIndex index = build_index(sample);

  CalibrationResult orig_c = solve_calibration(sample, aux, CalVariant::c, nullptr, {});
  CalibrationResult orig_cc = solve_calibration(sample, aux, CalVariant::cc, nullptr, {});

  std::size_t m = panel.m;
  CovAccumulator plain_uncentered(m), plain_centered(m);
  CovAccumulator cal_c(m), cal_cc(m), single_c(m);

  for (std::int64_t b = 0; b < options.covariance_replicates; ++b) {
    Rng rng1 = Rng::substream(options.seed, static_cast<std::uint64_t>(b), 1);
    Rng rng2 = Rng::substream(options.seed, static_cast<std::uint64_t>(b), 2);
    BootstrapWeights w = draw_bootstrap_weights(sample, index, rng1, rng2);

    plain_uncentered.add(boot_process_value(panel, sample, w, {false}));
    plain_centered.add(boot_process_value(panel, sample, w, {true}));

    CalibrationResult bc = solve_calibration(sample, aux, CalVariant::bc, &w.w2, {});
    cal_c.add(boot_process_value(panel, sample, w,
                                 {false, ProcessFlavor::Calibration::matched}, &bc, &orig_c));

    CalibrationResult bcc = solve_calibration(sample, aux, CalVariant::bcc, &w.w2, {});
    cal_cc.add(boot_process_value(panel, sample, w,
                                  {false, ProcessFlavor::Calibration::matched}, &bcc, &orig_cc));

    CalibrationResult bsc = solve_calibration(sample, aux, CalVariant::bsc, &w.w2, {});
    single_c.add(boot_process_value(panel, sample, w,
                                    {false, ProcessFlavor::Calibration::single}, &bsc, &orig_c));
  }

  ValidationReport report;
  add_covariance_checks(report, "uncentered plain", plain_uncentered, model,
                        OracleFlavor::motion, std::nullopt, options);
  add_covariance_checks(report, "centered plain", plain_centered, model, OracleFlavor::bridge,
                        std::nullopt, options);
  add_covariance_checks(report, "uncentered bc", cal_c, model, OracleFlavor::motion,
                        CalVariant::c, options);
  add_covariance_checks(report, "uncentered bcc", cal_cc, model, OracleFlavor::motion,
                        CalVariant::cc, options);
  add_covariance_checks(report, "uncentered bsc", single_c, model, OracleFlavor::motion,
                        CalVariant::c, options);

  // the constant function separates the Brownian-motion and bridge regimes
  ValidationCheck constant_motion;
  constant_motion.name = "uncentered constant variance (Brownian motion)";
  constant_motion.observed = plain_uncentered.cov(0, 0);
  constant_motion.expected = limit_covariance(model, 0, 0, OracleFlavor::motion);
  constant_motion.tolerance = scaled_rel_tol(options);
  constant_motion.relative = true;
  report.add(std::move(constant_motion));

  ValidationCheck constant_bridge;
  constant_bridge.name = "centered constant variance (Brownian bridge)";
  constant_bridge.observed = plain_centered.cov(0, 0);
  constant_bridge.expected = 0.0;
  constant_bridge.tolerance = 1e-12;
  report.add(std::move(constant_bridge));

  return report;
}

ValidationCheck pmf_chi_square_check(std::int64_t N_j, std::int64_t n_j, std::int64_t draws,
                                     std::uint64_t seed, double min_p_value) {
  Phase2Enumeration enumeration = enumerate_phase2_design(N_j, n_j);

  std::map<std::vector<std::int64_t>, std::int64_t> counts;
  Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(N_j * 100 + n_j), 2);
  std::vector<std::int64_t> outcome(static_cast<std::size_t>(N_j));
  for (std::int64_t d = 0; d < draws; ++d) {
    std::vector<char> mask = srswor_mask(N_j, n_j, rng);
    StratumPhase2Draw draw = draw_stratum_phase2(N_j, n_j, rng);
    std::fill(outcome.begin(), outcome.end(), 0);
    std::size_t k = 0;
    for (std::size_t i = 0; i < mask.size(); ++i)
      if (mask[i]) outcome[i] = draw.counts[k++];
    ++counts[outcome];
  }

  // expected counts; cells with expectation below 5 are pooled
  std::vector<std::pair<double, double>> cells;  // (expected, observed)
  double pooled_exp = 0.0, pooled_obs = 0.0;
  double total_known = 0.0;
  for (const Phase2Outcome& o : enumeration.outcomes) {
    double expected = o.prob * static_cast<double>(draws);
    auto it = counts.find(o.weights);
    double observed = it == counts.end() ? 0.0 : static_cast<double>(it->second);
    total_known += observed;
    if (expected < 5.0) {
      pooled_exp += expected;
      pooled_obs += observed;
    } else {
      cells.push_back({expected, observed});
    }
  }
  require(total_known == static_cast<double>(draws), ErrorCode::internal,
          "simulated an outcome outside the enumerated support");
  if (pooled_exp > 0.0) {
    if (pooled_exp >= 5.0 || cells.empty()) {
      cells.push_back({pooled_exp, pooled_obs});
    } else {
      cells.back().first += pooled_exp;
      cells.back().second += pooled_obs;
    }
  }

  double chi2 = 0.0;
  for (const auto& [expected, observed] : cells)
    chi2 += (observed - expected) * (observed - expected) / expected;
  double df = static_cast<double>(cells.size()) - 1.0;
  double p_value = df <= 0.0 ? 1.0 : chi_square_sf(chi2, df);

  ValidationCheck check;
  check.name = "phase-II pmf chi-square N=" + std::to_string(N_j) + " n=" + std::to_string(n_j);
  check.observed = p_value;
  check.expected = 1.0;  // any p above the floor passes
  check.tolerance = 1.0 - min_p_value;
  check.pass = p_value > min_p_value;
  return check;
}

namespace {

TwoPhaseSample single_stratum_sample(std::int64_t N, std::int64_t n) {
  TwoPhaseSample sample;
  for (std::int64_t i = 0; i < N; ++i) {
    Unit u;
    u.id = i + 1;
    u.stratum = 1;
    u.sampled = i < n;
    u.v = {1.0};
    if (u.sampled) u.x = {1.0};
    sample.units.push_back(std::move(u));
  }
  sample.strata = {{1, N, n}};
  return sample;
}

}  // namespace

std::vector<ValidationCheck> phase1_moment_checks(double fraction, std::int64_t draws,
                                                  std::uint64_t seed) {
  std::int64_t N = 100;
  std::int64_t n = static_cast<std::int64_t>(std::llround(fraction * static_cast<double>(N)));
  TwoPhaseSample sample = single_stratum_sample(N, n);
  double p = static_cast<double>(n) / static_cast<double>(N);
  double c2 = p / (2.0 - p);

  Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(n), 1);
  std::int64_t rounds = (draws + N - 1) / N;
  double sum = 0.0, sum2 = 0.0, min_w = 1e300;
  std::int64_t total = 0;
  for (std::int64_t r = 0; r < rounds; ++r) {
    std::vector<double> w1 = phase1_weights(sample, rng);
    for (double w : w1) {
      sum += w;
      sum2 += w * w;
      min_w = std::min(min_w, w);
      ++total;
    }
  }
  double nn = static_cast<double>(total);
  double m = sum / nn;
  double var = (sum2 - nn * m * m) / (nn - 1.0);

  std::vector<ValidationCheck> checks;
  ValidationCheck mean_check;
  mean_check.name = "phase-I weight mean, p=" + std::to_string(p);
  mean_check.observed = m;
  mean_check.expected = 1.0;
  mean_check.tolerance = 3.0 * std::sqrt(c2 / nn);
  mean_check.pass = std::abs(m - 1.0) <= mean_check.tolerance;
  checks.push_back(mean_check);

  ValidationCheck var_check;
  var_check.name = "phase-I weight variance, p=" + std::to_string(p);
  var_check.observed = var;
  var_check.expected = c2;
  var_check.tolerance = 0.02;
  var_check.relative = true;
  var_check.pass = std::abs(var - c2) / c2 <= 0.02;
  checks.push_back(var_check);

  ValidationCheck pos_check;
  pos_check.name = "phase-I weights strictly positive, p=" + std::to_string(p);
  pos_check.observed = min_w;
  pos_check.expected = min_w > 0.0 ? min_w : 0.0;
  pos_check.tolerance = 0.0;
  pos_check.pass = min_w > 0.0;
  checks.push_back(pos_check);
  return checks;
}

ValidationReport run_validation(const ValidationOptions& options) {
  ValidationReport report = covariance_validation(options);

  for (auto [N, n] : {std::pair<std::int64_t, std::int64_t>{5, 2}, {6, 3}, {7, 3}, {8, 3}}) {
    ValidationCheck check =
        pmf_chi_square_check(N, n, options.pmf_draws, options.seed, options.pmf_min_p_value);
    report.all_pass = report.all_pass && check.pass;
    report.checks.push_back(std::move(check));
  }

  for (double f : {0.1, 0.3, 0.5, 1.0}) {
    for (ValidationCheck& check : phase1_moment_checks(f, options.moment_draws, options.seed)) {
      report.all_pass = report.all_pass && check.pass;
      report.checks.push_back(std::move(check));
    }
  }
  return report;
}

}  // namespace tpb
