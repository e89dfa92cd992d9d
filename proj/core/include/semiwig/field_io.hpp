#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "semiwig/wigner.hpp"

namespace semiwig::io {

/// Sidecar record written next to every binary dump (<base>.json).
struct FieldMetadata {
  std::string kind;                 ///< "wigner", "kernel", "real"
  std::vector<std::size_t> shape;   ///< complex data carry a trailing 2
  double x0 = 0.0, dx = 0.0;
  double xi0 = 0.0, dxi = 0.0;      ///< second axis (xi for W, y for kernels, t for space-time)
  double hbar = 0.0;
};

/// Writes <base>.f64 (row-major float64 little-endian) and <base>.json.
void write_raw(const std::filesystem::path& base, std::span<const double> data, const FieldMetadata& meta);
void write_field(const std::filesystem::path& base, const WignerField& w);
void write_field(const std::filesystem::path& base, const KernelField& k);

FieldMetadata read_metadata(const std::filesystem::path& base);
std::vector<double> read_raw(const std::filesystem::path& base, const FieldMetadata& meta);
WignerField read_wigner(const std::filesystem::path& base);

/// One dump per frame (<dir>/<stem>_<index>) plus <dir>/<stem>_index.csv listing index,time.
void write_trajectory_index(const std::filesystem::path& dir, const std::string& stem,
                            const std::vector<double>& times);

}  // namespace semiwig::io
