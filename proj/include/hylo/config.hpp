#pragma once

// Run configuration and the run manifest.

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hylo/errors.hpp"
#include "hylo/minimizer.hpp"
#include "hylo/stability.hpp"

namespace hylo {

// Invalid configuration document (malformed JSON or schema violation).
class ConfigError : public FormatError {
 public:
  using FormatError::FormatError;
};

// The shipped schema/run_config.schema.json.
const nlohmann::json& run_config_schema();

struct InitialCondition {
  std::string kind = "gaussian";  // gaussian | file
  double amplitude = 1.0;
  double width = 1.0;
  double omega = 1.0;
  std::string path;
};

struct SweepConfig {
  std::map<std::string, std::vector<double>> w;  // W parameter -> values
  std::vector<double> delta;
  int jobs = 1;
};

struct RunConfig {
  ModelSpec model{ModelTag::NLS, Grid::line(512, 40.0), WSpec{}};
  std::optional<std::vector<double>> delta_list;  // nullopt: derived from delta_bar
  std::optional<double> a;                         // nullopt: auto
  std::optional<double> s_exp;                     // nullopt: auto
  MinimizeOptions minimize;
  EvolveOptions evolve;
  InitialCondition initial;
  StabilityOptions stability;
  std::vector<Perturbation> perturbations;
  std::vector<double> vscan_radii;
  int audit_budget = 10000;
  SweepConfig sweep;
  std::uint64_t seed = 1;
  std::string output = "out";
  nlohmann::json source;  // the validated document
};

// Parses and validates (schema first, then model-level checks). Throws
// ConfigError with every issue found.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
// Same as parse_config on an already parsed document.
RunConfig config_from_json(const nlohmann::json& doc);

// Default NLS run: N = 1, m^2 = 1, W = s^2/2 - s^4/4, L = 40, n = 512.
nlohmann::json default_nls_config();

// A copy of `w` with one named parameter replaced; throws ConfigError for
// unknown names.
WSpec with_w_param(WSpec w, const std::string& name, double value);

struct OutputRecord {
  std::string path;  // relative to the output directory
  std::string fnv1a64;
  std::uintmax_t bytes = 0;
};

class RunManifest {
 public:
  RunManifest(std::string tool_version, std::string command);

  void set_config(nlohmann::json config) { config_ = std::move(config); }
  void set_certificate_summary(nlohmann::json summary) { certificate_ = std::move(summary); }
  // Checksums the file now; call after it is closed.
  void add_output(const std::string& out_dir, const std::string& relative_path);
  void fail(std::string stage, std::string message, int exit_code);
  void finish(int exit_code);

  nlohmann::json to_json() const;
  // Writes manifest.json (the directory is created when missing).
  void write(const std::string& out_dir) const;

  const std::vector<OutputRecord>& outputs() const { return outputs_; }

 private:
  std::string version_;
  std::string command_;
  std::string started_;
  std::string finished_;
  nlohmann::json config_;
  nlohmann::json certificate_;
  std::vector<OutputRecord> outputs_;
  std::string status_ = "running";
  std::string failure_stage_;
  std::string failure_message_;
  int exit_code_ = -1;
};

// UTC time as 2026-01-31T12:34:56Z.
std::string utc_timestamp();
// FNV-1a of a file's bytes, as 16 hex digits.
std::string file_checksum(const std::string& path);

}  // namespace hylo
