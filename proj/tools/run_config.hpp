#pragma once

// Run configuration for the ghft command-line tool.
//
// Text form: key = value lines grouped by [section] headers, '#' comments.
// JSON form: {"model": {...}, "solver": {...}, ...} with the same keys.

#include "ghft/hubbard.hpp"
#include "ghft/verify.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace ghft::cli {

struct RunConfig {
  HubbardParams model;

  // solver
  double dtau = 0.0;  ///< 0: automatic
  double tol = 1e-10;
  long max_iter = 200000;
  double pairing_seed = 1e-2;
  double magnetic_seed = 1.0;
  bool magnetic_start = true;

  // spectrum
  double zero_tol = 1e-6;
  double degeneracy_tol = 1e-6;
  double presence = 0.01;
  double flat_tol = 1e-6;
  std::string momenta = "both";  ///< grid | path | both

  // output
  std::string dir = ".";
  std::string prefix;
  std::string cm_format = "csv";  ///< csv | binary

  // sweep
  std::vector<double> sweep_u;
  std::vector<double> sweep_mu;
  bool sweep_dispersion = false;

  // verify
  VerifyOptions verify;

  void validate() const;
  GroundStateOptions ground_options() const;
  DispersionOptions dispersion_options() const;
  ClassificationOptions classification_options() const;
};

struct ConfigError : Error {
  using Error::Error;
};

/// Applies "section.key" = value; throws ConfigError on unknown keys or bad values.
void set_value(RunConfig& c, const std::string& key, const std::string& value);

RunConfig parse_text(const std::string& text, const std::string& source = "<config>");
RunConfig parse_json(const nlohmann::json& j);
/// Dispatches on content: a leading '{' selects JSON.
RunConfig load_config(const std::string& path);

std::string to_text(const RunConfig& c);
nlohmann::json to_json(const RunConfig& c);

/// FNV-1a 64 over the canonical model parameters, as 16 hex digits.
std::string parameter_hash(const HubbardParams& p);

}  // namespace ghft::cli
