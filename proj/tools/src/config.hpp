#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace semiwig::cli {

enum class Kind { transform, evolve, sweep, purity, averaging, madelung, density1d };
const char* to_string(Kind k) noexcept;

struct Diagnostic {
  std::size_t line = 0;  ///< 0 when unknown
  std::string field;
  std::string message;
};

/// State recipe. Numbers are kept raw; expressions are parsed during validation.
struct StateSpec {
  std::string family;  // coherent, periodic_coherent, wkb, scaled, hermite, hermite_mixture, stationary, mixture
  std::vector<double> q{0.0}, p{0.0};
  std::string amplitude = "exp(-x^2/2)";
  std::string phase = "0";
  std::string profile = "exp(-x^2/2)";
  double alpha = 0.5;
  double width = 1.0;
  std::size_t n = 0;
  double omega = 1.0;
  std::optional<std::size_t> rank;  ///< hermite_mixture; empty = ceil(1 / (2 pi hbar))
  std::string potential;            ///< stationary
  std::vector<StateSpec> components;
  std::vector<double> weights;
  std::string label;
  std::string expect;  ///< purity: pure/mixed; averaging: bounded/grows
  std::string mode = "enforce";
};

struct PotentialSpec {
  std::string kind = "zero";  // zero, harmonic, soft_harmonic, expression
  double omega = 1.0, center = 0.0, strength = 1.0;
  std::string expression;
};

struct EvolutionSpec {
  double dt = 1e-3;
  double t_final = 0.1;
  std::size_t record_stride = 1;
  std::string backend = "schrodinger";
};

struct ExperimentConfig {
  std::filesystem::path source;
  std::string text;
  std::string name;
  std::string description;
  Kind kind = Kind::transform;
  std::size_t n = 256;
  double length = 16.0;
  std::size_t dim = 1;
  double mass = 1.0;
  std::vector<double> hbars;
  std::vector<double> times{0.0};
  std::vector<StateSpec> states;
  PotentialSpec potential;
  EvolutionSpec evolution;
  std::uint64_t seed = 1;
  std::size_t random_mixtures = 0;
  std::string cutoff = "exp(-xi^2/2)";
  double sobolev_s = 0.25;
  double beta = 0.0;
  std::size_t order = 0;  ///< density1d: n
  std::vector<double> coefficients;
  bool dump_fields = false;
  std::map<std::string, double> thresholds;
  std::map<std::string, double> expect;
};

/// Reads and validates. Diagnostics are appended; a config is usable only when none were added.
std::optional<ExperimentConfig> load_config(const std::filesystem::path& path, std::vector<Diagnostic>& out);

/// 64-bit FNV-1a over the raw bytes.
std::uint64_t fnv1a(const std::string& bytes);

std::string format(const Diagnostic& d, const std::filesystem::path& file);

}  // namespace semiwig::cli
