#include "semiwig/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <json.hpp>

#include "semiwig/error.hpp"

namespace semiwig::io {
namespace {

std::filesystem::path with_ext(const std::filesystem::path& base, const char* ext) {
  auto p = base;
  p += ext;
  return p;
}

void write_le(std::ostream& os, std::span<const double> data) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
  } else {
    for (double v : data) {
      unsigned char b[8];
      std::memcpy(b, &v, 8);
      for (int i = 7; i >= 0; --i) os.put(static_cast<char>(b[i]));
    }
  }
}

}  // namespace

void write_raw(const std::filesystem::path& base, std::span<const double> data, const FieldMetadata& meta) {
  std::size_t count = 1;
  for (auto s : meta.shape) count *= s;
  if (count != data.size()) throw InvalidParameter("metadata shape does not match data length");
  {
    std::ofstream os(with_ext(base, ".f64"), std::ios::binary);
    if (!os) throw Error("cannot open " + with_ext(base, ".f64").string());
    write_le(os, data);
  }
  nlohmann::ordered_json j;
  j["kind"] = meta.kind;
  j["shape"] = meta.shape;
  j["x0"] = meta.x0;
  j["dx"] = meta.dx;
  j["xi0"] = meta.xi0;
  j["dxi"] = meta.dxi;
  j["hbar"] = meta.hbar;
  j["dtype"] = "float64";
  j["byte_order"] = "little";
  j["layout"] = "row-major";
  std::ofstream ms(with_ext(base, ".json"));
  if (!ms) throw Error("cannot open " + with_ext(base, ".json").string());
  ms << std::setprecision(17) << j.dump(2) << '\n';
}

void write_field(const std::filesystem::path& base, const WignerField& w) {
  FieldMetadata m{"wigner", {w.values.rows, w.values.cols}, w.grid.xgrid.origin(), w.grid.xgrid.spacing(),
                  w.grid.xigrid.first(), w.grid.xigrid.spacing(), w.hbar};
  write_raw(base, w.values.data, m);
}

void write_field(const std::filesystem::path& base, const KernelField& k) {
  FieldMetadata m{"kernel", {k.values.rows, k.values.cols, 2}, k.grid.xgrid.origin(), k.grid.xgrid.spacing(),
                  k.grid.ygrid.origin(), k.grid.ygrid.spacing(), k.hbar};
  std::span<const double> raw(reinterpret_cast<const double*>(k.values.data.data()), 2 * k.values.size());
  write_raw(base, raw, m);
}

FieldMetadata read_metadata(const std::filesystem::path& base) {
  std::ifstream is(with_ext(base, ".json"));
  if (!is) throw Error("cannot open " + with_ext(base, ".json").string());
  const auto j = nlohmann::json::parse(is);
  FieldMetadata m;
  m.kind = j.at("kind").get<std::string>();
  m.shape = j.at("shape").get<std::vector<std::size_t>>();
  m.x0 = j.at("x0").get<double>();
  m.dx = j.at("dx").get<double>();
  m.xi0 = j.at("xi0").get<double>();
  m.dxi = j.at("dxi").get<double>();
  m.hbar = j.at("hbar").get<double>();
  return m;
}

std::vector<double> read_raw(const std::filesystem::path& base, const FieldMetadata& meta) {
  std::size_t count = 1;
  for (auto s : meta.shape) count *= s;
  std::ifstream is(with_ext(base, ".f64"), std::ios::binary);
  if (!is) throw Error("cannot open " + with_ext(base, ".f64").string());
  std::vector<double> out(count);
  std::vector<unsigned char> bytes(count * 8);
  is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(is.gcount()) != bytes.size()) throw Error("truncated field dump");
  for (std::size_t i = 0; i < count; ++i) {
    unsigned char b[8];
    for (int k = 0; k < 8; ++k)
      b[k] = std::endian::native == std::endian::little ? bytes[i * 8 + static_cast<std::size_t>(k)]
                                                        : bytes[i * 8 + 7 - static_cast<std::size_t>(k)];
    std::memcpy(&out[i], b, 8);
  }
  return out;
}

WignerField read_wigner(const std::filesystem::path& base) {
  const auto m = read_metadata(base);
  if (m.kind != "wigner" || m.shape.size() != 2) throw Error("dump is not a Wigner field");
  const std::size_t nx = m.shape[0], nxi = m.shape[1];
  const SpatialGrid xg(nx, m.dx * static_cast<double>(nx), m.x0);
  const double ly = 2.0 * 3.14159265358979323846 / m.dxi;
  const PhaseGrid pg(xg, SpatialGrid::centered(nxi, ly));
  WignerField w{pg, m.hbar, Array2<double>(nx, nxi)};
  w.values.data = read_raw(base, m);
  return w;
}

void write_trajectory_index(const std::filesystem::path& dir, const std::string& stem,
                            const std::vector<double>& times) {
  std::ofstream os(dir / (stem + "_index.csv"));
  if (!os) throw Error("cannot write trajectory index");
  os << "index,time\n" << std::setprecision(17);
  for (std::size_t i = 0; i < times.size(); ++i) os << i << ',' << times[i] << '\n';
}

}  // namespace semiwig::io
