#pragma once

#include "spectral_lab/construction.hpp"
#include "spectral_lab/dynamics.hpp"
#include "spectral_lab/sampler.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spectral_lab {

// Invalid configuration; `field` is the dotted path of the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct SystemConfig {
  std::string kind = "rotation";  // rotation | iid
  double alpha = kGoldenMean;
  bool alpha_golden = true;
  int depth = RotationSystem::kDefaultDepth;
  std::vector<double> levels = {-1.0, 1.0};
  std::vector<double> probs = {0.5, 0.5};
};

struct SamplerConfig {
  std::string kind = "zero";  // zero | constant | cosine | identity | composed-file
  double c = 0.0;
  double lambda = 1.0;
  double phase = 0.0;
  std::string file;
};

struct NumericsConfig {
  std::size_t N = 2000;
  std::size_t M = 50;
  std::uint64_t seed = 1;
  std::optional<double> grid_lo, grid_hi;  // default [-R, R], R = 2 + sup|v| + grid_margin
  double grid_margin = 0.5;
  std::size_t grid_size = 401;
  int J = 8;
  double eps = 0.1;  // mollification width for smoothed outputs
  double gap_tol = 0.05;
  double weight_tol = 1e-4;
  double edge_exclusion = 0.02;
  std::size_t n = 10000;  // cocycle length
  std::size_t M_le = 32;  // base points per Lyapunov estimate
};

struct WaltersConfig {
  std::vector<double> energies;  // empty: argmin of L on the spectrum and max edge + outside_offset
  std::vector<std::size_t> n_list = {1000, 10000};
  std::size_t omega_grid = 4096;
  double outside_offset = 1.0;
};

struct ConstructionConfig {
  double eps = 0.5;
  std::size_t n_steps = 2;
  ConstructionParams params;
};

struct RunConfig {
  SystemConfig system;
  SamplerConfig sampler;
  NumericsConfig numerics;
  WaltersConfig walters;
  ConstructionConfig construction;
  std::string output_dir = "run";
  unsigned threads = 0;
};

// Every field with its default.
nlohmann::json default_config_json();

// Overlays user JSON on the defaults (unknown keys are errors), validates and
// converts. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& user);

// Fully resolved configuration, suitable for config.json.
nlohmann::json to_json(const RunConfig& cfg);

// Sets a dotted path (e.g. "numerics.N") in a JSON document. The value text is
// parsed as JSON when possible and kept as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& dotted, const std::string& value);

BaseSystem make_system(const RunConfig& cfg);
ComposedSampler make_sampler(const RunConfig& cfg);

}  // namespace spectral_lab
