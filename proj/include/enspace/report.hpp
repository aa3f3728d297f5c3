#pragma once

// Plain-text "key: value" documents for metrics, residuals, certificates and
// run manifests. Each document is a single top-level section; nested keys are
// indented by two spaces. The format is a YAML subset, and reading goes
// through the YAML parser.

#include <map>
#include <string>

#include "enspace/analysis.hpp"
#include "enspace/sim_engine.hpp"

namespace enspace {

struct RunManifest {
  std::string command;
  std::string scenario_file;
  std::string output_dir;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::string config_hash;  // SHA-256 of the resolved scenario document
  std::string status;
  std::string message;
};

std::string to_document(const Metrics& m);
std::string to_document(const ResidualReport& r);
std::string to_document(const CertificateReport& c);
std::string to_document(const RunManifest& m);

/// Parsers for the documents above. Throw ConfigError naming the missing key.
Metrics metrics_from_document(const std::string& text);
ResidualReport residuals_from_document(const std::string& text);
CertificateReport certificate_from_document(const std::string& text);
RunManifest manifest_from_document(const std::string& text);

/// Shortest text that reads back as the same double ('.inf', '.nan' for the
/// non-finite values).
std::string format_double(double v);

}  // namespace enspace
