#include "tpb/panel.hpp"

#include <cstdlib>

#include "tpb/error.hpp"

namespace tpb {

namespace {

// parses "v3" / "x2" style selectors; returns 0 on mismatch
std::size_t indexed_selector(const std::string& selector, char prefix) {
  if (selector.size() < 2 || selector[0] != prefix) return 0;
  std::size_t idx = 0;
  for (std::size_t i = 1; i < selector.size(); ++i) {
    if (selector[i] < '0' || selector[i] > '9') return 0;
    idx = idx * 10 + static_cast<std::size_t>(selector[i] - '0');
  }
  return idx;
}

}  // namespace

bool column_is_phase1(const std::string& selector) {
  return selector != "const" && indexed_selector(selector, 'x') == 0;
}

double unit_column_value(const Unit& unit, const std::string& selector) {
  if (selector == "const") return 1.0;
  if (selector == "y") return unit.y;
  if (selector == "delta") return unit.delta;
  if (std::size_t idx = indexed_selector(selector, 'v'); idx != 0) {
    require(idx <= unit.v.size(), ErrorCode::invalid_argument,
            "column '" + selector + "' out of range");
    return unit.v[idx - 1];
  }
  if (std::size_t idx = indexed_selector(selector, 'x'); idx != 0) {
    require(unit.sampled, ErrorCode::missing_payload,
            "column '" + selector + "' requested on an unsampled unit");
    require(idx <= unit.x.size(), ErrorCode::invalid_argument,
            "column '" + selector + "' out of range");
    return unit.x[idx - 1];
  }
  fail(ErrorCode::invalid_argument, "unknown column selector '" + selector + "'");
}

FunctionPanel FunctionPanel::constant(std::size_t n_units, double value) {
  FunctionPanel p;
  p.m = 1;
  p.values.assign(n_units, value);
  return p;
}

FunctionPanel FunctionPanel::from_column(const TwoPhaseSample& sample,
                                         const std::string& selector) {
  return from_columns(sample, {selector});
}

FunctionPanel FunctionPanel::from_columns(const TwoPhaseSample& sample,
                                          const std::vector<std::string>& selectors) {
  require(!selectors.empty(), ErrorCode::invalid_argument, "no columns selected");
  FunctionPanel p;
  p.m = selectors.size();
  std::size_t n = sample.units.size();
  p.values.assign(n * p.m, 0.0);
  bool any_phase2 = false;
  for (const std::string& s : selectors) any_phase2 = any_phase2 || !column_is_phase1(s);
  if (any_phase2) {
    p.available.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) p.available[i] = sample.units[i].sampled ? 1 : 0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (any_phase2 && !sample.units[i].sampled) continue;
    for (std::size_t f = 0; f < p.m; ++f)
      p.at(i, f) = unit_column_value(sample.units[i], selectors[f]);
  }
  return p;
}

}  // namespace tpb
