#pragma once

#include <string>
#include <vector>

#include "tpb/design.hpp"

namespace tpb {

// Finite panel of index-function evaluations: one value per unit per
// function. Phase-II functions are defined only on sampled units, which the
// availability mask records (empty mask = defined everywhere).
struct FunctionPanel {
  std::size_t m = 0;
  std::vector<double> values;   // N x m, row-major
  std::vector<char> available;  // per unit; empty means all units

  double at(std::size_t unit, std::size_t fn) const { return values[unit * m + fn]; }
  double& at(std::size_t unit, std::size_t fn) { return values[unit * m + fn]; }

  bool fully_available() const {
    if (available.empty()) return true;
    for (char a : available)
      if (!a) return false;
    return true;
  }
  bool is_available(std::size_t unit) const { return available.empty() || available[unit]; }

  static FunctionPanel constant(std::size_t n_units, double value);
  // selector: "y", "delta", "v1".."vk", "x1".."xm", or "const"
  static FunctionPanel from_column(const TwoPhaseSample& sample, const std::string& selector);
  static FunctionPanel from_columns(const TwoPhaseSample& sample,
                                    const std::vector<std::string>& selectors);
};

// Value of one named column for one unit; phase-II columns are only valid on
// sampled units.
double unit_column_value(const Unit& unit, const std::string& selector);
bool column_is_phase1(const std::string& selector);

}  // namespace tpb
