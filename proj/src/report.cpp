#include "tpb/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "tpb/error.hpp"

namespace tpb {

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "null";
  if (std::isinf(x)) return x > 0 ? "1e999" : "-1e999";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string num(std::int64_t x) { return std::to_string(x); }

std::string vec(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += num(v[i]);
  }
  return s + "]";
}

std::string mat(const Matrix& m) {
  std::string s = "[";
  for (std::size_t r = 0; r < m.rows; ++r) {
    if (r) s += ",";
    s += "[";
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (c) s += ",";
      s += num(m(r, c));
    }
    s += "]";
  }
  return s + "]";
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string summary_to_json(const BootstrapSummary& summary, const BootstrapPlan& plan) {
  std::string s = "{\n";
  s += "  \"B\": " + num(summary.B) + ",\n";
  s += "  \"seed\": " + num(static_cast<std::int64_t>(plan.seed)) + ",\n";
  s += "  \"estimator\": " + quoted(estimator_name(plan.estimator)) + ",\n";
  s += "  \"calibration\": " + quoted(calibration_name(plan.calibration)) + ",\n";
  s += "  \"boot_calibration\": " + quoted(boot_calibration_name(plan.boot_calibration)) + ",\n";
  s += "  \"dim\": " + num(static_cast<std::int64_t>(summary.dim)) + ",\n";
  s += "  \"failures\": " + num(summary.failures) + ",\n";
  s += "  \"center_plain\": " + vec(summary.center_plain) + ",\n";
  if (summary.center_calibrated.empty()) {
    s += "  \"center_calibrated\": null,\n";
  } else {
    s += "  \"center_calibrated\": " + vec(summary.center_calibrated) + ",\n";
  }
  s += "  \"designated_center\": ";
  s += summary.center_is_calibrated ? "\"calibrated\"" : "\"plain\"";
  s += ",\n";
  s += "  \"boot_mean\": " + vec(summary.boot_mean) + ",\n";
  s += "  \"boot_variance\": " + mat(summary.boot_var) + ",\n";
  s += "  \"boot_se\": " + vec(summary.boot_se) + ",\n";
  s += "  \"percentile_2.5\": " + vec(summary.ci_lower) + ",\n";
  s += "  \"percentile_97.5\": " + vec(summary.ci_upper) + "\n";
  s += "}\n";
  return s;
}

std::string replicates_to_csv(const BootstrapSummary& summary) {
  std::string s = "replicate";
  for (std::size_t c = 0; c < summary.dim; ++c)
    s += ",theta_" + std::to_string(c + 1);
  s += ",converged\n";
  for (std::size_t b = 0; b < summary.estimates.size(); ++b) {
    s += std::to_string(b);
    const auto& est = summary.estimates[b];
    if (est.empty()) {
      for (std::size_t c = 0; c < summary.dim; ++c) s += ",";
      s += ",0\n";
    } else {
      for (std::size_t c = 0; c < summary.dim; ++c) s += "," + num(est[c]);
      s += ",1\n";
    }
  }
  return s;
}

std::string fit_report_to_json(const FitReport& report) {
  std::string s = "{\n";
  s += "  \"theta_hat\": " + vec(report.fit.theta) + ",\n";
  s += "  \"se_standard\": " + vec(report.se) + ",\n";
  s += "  \"var_theta\": " + mat(report.var_theta) + ",\n";
  s += "  \"sigma\": " + mat(report.sigma) + ",\n";
  s += "  \"calibration\": " + quoted(calibration_name(report.calibration)) + ",\n";
  s += "  \"converged\": ";
  s += report.fit.converged ? "true" : "false";
  s += ",\n";
  s += "  \"iterations\": " + num(static_cast<std::int64_t>(report.fit.iterations)) + ",\n";
  s += "  \"n_events\": " + num(static_cast<std::int64_t>(report.fit.n_events)) + ",\n";
  s += "  \"loglik\": " + num(report.fit.loglik) + "\n";
  s += "}\n";
  return s;
}

std::string validation_report_to_json(const ValidationReport& report) {
  std::string s = "{\n  \"all_pass\": ";
  s += report.all_pass ? "true" : "false";
  s += ",\n  \"checks\": [\n";
  for (std::size_t i = 0; i < report.checks.size(); ++i) {
    const ValidationCheck& c = report.checks[i];
    s += "    {\"name\": " + quoted(c.name) + ", \"observed\": " + num(c.observed) +
         ", \"expected\": " + num(c.expected) + ", \"tolerance\": " + num(c.tolerance) +
         ", \"relative\": " + (c.relative ? "true" : "false") +
         ", \"pass\": " + (c.pass ? "true" : "false") + "}";
    if (i + 1 < report.checks.size()) s += ",";
    s += "\n";
  }
  s += "  ]\n}\n";
  return s;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::io, "cannot open '" + path + "' for writing");
  out << content;
  require(out.good(), ErrorCode::io, "write failed for '" + path + "'");
}

}  // namespace tpb
