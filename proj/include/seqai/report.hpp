#pragma once

#include <optional>
#include <string>

#include "seqai/engine.hpp"

namespace seqai {

struct ReportOptions {
  std::string program;  // shown as given on the command line
  std::optional<SafetyReport> safety;
  int oracle_depth = 0;
};

const char* domain_name(DomainKind d);
int pct_d(const AnalysisResult& r);

std::string report_text(const AnalysisResult& r, const ReportOptions& o);
std::string report_json(const AnalysisResult& r, const ReportOptions& o);

}  // namespace seqai
