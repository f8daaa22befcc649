#pragma once

#include <string>

#include "tpb/engine.hpp"
#include "tpb/validate.hpp"

namespace tpb {

// Machine-readable outputs. Numbers carry 17 significant digits so reruns are
// byte-comparable and values round-trip exactly.
std::string summary_to_json(const BootstrapSummary& summary, const BootstrapPlan& plan);
std::string replicates_to_csv(const BootstrapSummary& summary);
std::string fit_report_to_json(const FitReport& report);
std::string validation_report_to_json(const ValidationReport& report);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace tpb
