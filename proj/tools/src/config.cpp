#include "config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "semiwig/error.hpp"
#include "semiwig/expression.hpp"

namespace semiwig::cli {

using nlohmann::json;

const char* to_string(Kind k) noexcept {
  switch (k) {
    case Kind::transform: return "transform";
    case Kind::evolve: return "evolve";
    case Kind::sweep: return "sweep";
    case Kind::purity: return "purity";
    case Kind::averaging: return "averaging";
    case Kind::madelung: return "madelung";
    case Kind::density1d: return "density1d";
  }
  return "?";
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string format(const Diagnostic& d, const std::filesystem::path& file) {
  std::ostringstream os;
  os << file.string();
  if (d.line) os << ':' << d.line;
  os << ": ";
  if (!d.field.empty()) os << "field '" << d.field << "': ";
  os << d.message;
  return os.str();
}

namespace {

std::size_t line_at(const std::string& text, std::size_t pos) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < pos && i < text.size(); ++i) line += text[i] == '\n';
  return line;
}

// Field lookup by scanning for the quoted key; nlohmann does not keep source positions.
class Reader {
 public:
  Reader(const std::string& text, std::vector<Diagnostic>& out) : text_(text), out_(out) {}

  std::size_t locate(const std::string& key, std::size_t from = 0, std::size_t nth = 0) const {
    const std::string needle = "\"" + key + "\"";
    std::size_t pos = from, k = 0;
    while ((pos = text_.find(needle, pos)) != std::string::npos) {
      std::size_t q = pos + needle.size();
      while (q < text_.size() && std::isspace(static_cast<unsigned char>(text_[q]))) ++q;
      if (q < text_.size() && text_[q] == ':') {
        if (k == nth) return pos;
        ++k;
      }
      pos += needle.size();
    }
    return std::string::npos;
  }

  void error(const std::string& field, const std::string& msg, std::size_t anchor = 0) {
    std::string key = field.substr(field.find_last_of('.') == std::string::npos ? 0 : field.find_last_of('.') + 1);
    if (const auto b = key.find('['); b != std::string::npos) key = key.substr(0, b);
    auto pos = locate(key, anchor);
    if (pos == std::string::npos && anchor > 0) pos = anchor;
    out_.push_back({pos == std::string::npos ? 0 : line_at(text_, pos), field, msg});
  }

  /// Opening brace of the object holding the key found at `pos`.
  std::size_t object_start(std::size_t pos) const {
    if (pos == std::string::npos) return 0;
    const auto b = text_.rfind('{', pos);
    return b == std::string::npos ? 0 : b;
  }

  double number(const json& obj, const std::string& key, const std::string& path, double fallback,
                std::size_t anchor = 0, bool positive = false) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) {
      error(path, "expected a number", anchor);
      return fallback;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d) || (positive && !(d > 0.0))) {
      error(path, positive ? "must be a positive finite number" : "must be finite", anchor);
      return fallback;
    }
    return d;
  }

  std::size_t count(const json& obj, const std::string& key, const std::string& path, std::size_t fallback,
                    std::size_t anchor = 0) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      error(path, "expected a non-negative integer", anchor);
      return fallback;
    }
    return static_cast<std::size_t>(v.get<long long>());
  }

  std::string string(const json& obj, const std::string& key, const std::string& path, const std::string& fallback,
                     std::size_t anchor = 0) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_string()) {
      error(path, "expected a string", anchor);
      return fallback;
    }
    return v.get<std::string>();
  }

  std::vector<double> numbers(const json& obj, const std::string& key, const std::string& path,
                              std::vector<double> fallback, std::size_t anchor = 0) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) {
      error(path, "expected a number or a list of numbers", anchor);
      return fallback;
    }
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) {
        error(path, "list entries must be numbers", anchor);
        return fallback;
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  void expression(const std::string& text, std::vector<std::string> vars, const std::string& path,
                  std::size_t anchor = 0) {
    try {
      (void)Expression::parse(text, std::move(vars));
    } catch (const ParseError& e) {
      error(path, std::string("parse error in \"") + text + "\": " + e.what(), anchor);
    }
  }

  void unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& prefix,
                    std::size_t anchor = 0) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!allowed.count(it.key())) error(prefix + it.key(), "unknown field", anchor);
  }

 private:
  const std::string& text_;
  std::vector<Diagnostic>& out_;
};

const std::set<std::string> kFamilies{"coherent",       "periodic_coherent", "wkb",     "scaled", "hermite",
                                      "hermite_mixture", "stationary",        "mixture"};

StateSpec read_state(Reader& r, const json& j, const std::string& path, std::size_t anchor, std::size_t dim) {
  StateSpec s;
  if (!j.is_object()) {
    r.error(path, "expected an object", anchor);
    return s;
  }
  r.unknown_keys(j,
                 {"family", "q", "p", "amplitude", "phase", "profile", "alpha", "width", "n", "omega", "rank",
                  "potential", "components", "weights", "label", "expect", "mode"},
                 path + ".", anchor);
  s.family = r.string(j, "family", path + ".family", "", anchor);
  if (!kFamilies.count(s.family)) {
    r.error(path + ".family", "unknown state family \"" + s.family + "\"", anchor);
    return s;
  }
  s.q = r.numbers(j, "q", path + ".q", std::vector<double>(dim, 0.0), anchor);
  s.p = r.numbers(j, "p", path + ".p", std::vector<double>(dim, 0.0), anchor);
  if ((s.family == "coherent" || s.family == "periodic_coherent") && (s.q.size() != dim || s.p.size() != dim))
    r.error(path + ".q", "q and p need one entry per dimension", anchor);
  if (dim != 1 && s.family != "coherent")
    r.error(path + ".family", "only coherent states are available in more than one dimension", anchor);
  s.amplitude = r.string(j, "amplitude", path + ".amplitude", s.amplitude, anchor);
  s.phase = r.string(j, "phase", path + ".phase", s.phase, anchor);
  s.profile = r.string(j, "profile", path + ".profile", s.profile, anchor);
  if (s.family == "wkb") {
    r.expression(s.amplitude, {"x", "hbar"}, path + ".amplitude", anchor);
    r.expression(s.phase, {"x", "hbar"}, path + ".phase", anchor);
  }
  if (s.family == "scaled") r.expression(s.profile, {"x"}, path + ".profile", anchor);
  s.alpha = r.number(j, "alpha", path + ".alpha", s.alpha, anchor);
  if (s.family == "scaled" && !(s.alpha >= 0.0 && s.alpha <= 1.0))
    r.error(path + ".alpha", "alpha must lie in [0, 1]", anchor);
  s.width = r.number(j, "width", path + ".width", s.width, anchor, true);
  s.n = r.count(j, "n", path + ".n", 0, anchor);
  s.omega = r.number(j, "omega", path + ".omega", 1.0, anchor, true);
  if (j.contains("rank") && !(j["rank"].is_string() && j["rank"] == "auto")) {
    s.rank = r.count(j, "rank", path + ".rank", 1, anchor);
    if (*s.rank == 0) r.error(path + ".rank", "rank must be at least 1", anchor);
  }
  s.potential = r.string(j, "potential", path + ".potential", "x^2/2", anchor);
  if (s.family == "stationary") r.expression(s.potential, {"x", "hbar"}, path + ".potential", anchor);
  s.label = r.string(j, "label", path + ".label", s.family, anchor);
  s.expect = r.string(j, "expect", path + ".expect", "", anchor);
  s.mode = r.string(j, "mode", path + ".mode", "enforce", anchor);
  if (s.mode != "enforce" && s.mode != "diagnose") r.error(path + ".mode", "expected enforce or diagnose", anchor);
  if (s.family == "mixture") {
    if (!j.contains("components") || !j["components"].is_array() || j["components"].size() < 2) {
      r.error(path + ".components", "a mixture needs at least two components", anchor);
    } else {
      std::size_t i = 0;
      for (const auto& c : j["components"]) {
        s.components.push_back(read_state(r, c, path + ".components[" + std::to_string(i) + "]",
                                          r.object_start(r.locate("family", anchor, i + 1)), dim));
        ++i;
      }
      if (s.components.back().family == "mixture")
        r.error(path + ".components", "nested mixtures are not supported", anchor);
    }
    s.weights = r.numbers(j, "weights", path + ".weights", {}, anchor);
    if (s.weights.size() != s.components.size())
      r.error(path + ".weights", "one weight per component is required", anchor);
    for (double w : s.weights)
      if (!(w > 0.0)) r.error(path + ".weights", "weights must be positive", anchor);
  }
  return s;
}

}  // namespace

std::optional<ExperimentConfig> load_config(const std::filesystem::path& path, std::vector<Diagnostic>& out) {
  const std::size_t before = out.size();
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    out.push_back({0, "", "cannot read config file"});
    return std::nullopt;
  }
  ExperimentConfig c;
  c.source = path;
  c.text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());

  json j;
  try {
    j = json::parse(c.text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    const std::size_t pos = e.byte > 0 ? e.byte - 1 : 0;
    const std::size_t line = line_at(c.text, pos);
    const std::size_t sol = c.text.rfind('\n', pos == 0 ? 0 : pos - 1);
    const std::size_t col = pos - (sol == std::string::npos ? 0 : sol + 1) + 1;
    out.push_back({line, "", "malformed JSON at column " + std::to_string(col)});
    return std::nullopt;
  }
  if (!j.is_object()) {
    out.push_back({1, "", "top level must be an object"});
    return std::nullopt;
  }

  Reader r(c.text, out);
  r.unknown_keys(j, {"name", "description", "kind", "grid", "mass", "hbar", "times", "state", "states", "potential",
                     "evolution", "seed", "random_mixtures", "cutoff", "sobolev_s", "beta", "order", "coefficients",
                     "dump_fields", "thresholds", "expect"},
                 "");
  c.name = r.string(j, "name", "name", path.stem().string());
  c.description = r.string(j, "description", "description", "");

  const std::string kind = r.string(j, "kind", "kind", "");
  static const std::map<std::string, Kind> kinds{{"transform", Kind::transform}, {"evolve", Kind::evolve},
                                                 {"sweep", Kind::sweep},         {"purity", Kind::purity},
                                                 {"averaging", Kind::averaging}, {"madelung", Kind::madelung},
                                                 {"density1d", Kind::density1d}};
  if (const auto it = kinds.find(kind); it != kinds.end())
    c.kind = it->second;
  else
    r.error("kind", kind.empty() ? "missing experiment kind" : "unknown experiment kind \"" + kind + "\"");

  if (j.contains("grid")) {
    const auto& g = j["grid"];
    const std::size_t a = r.locate("grid");
    if (!g.is_object()) {
      r.error("grid", "expected an object");
    } else {
      r.unknown_keys(g, {"n", "length", "dim"}, "grid.", a);
      c.n = r.count(g, "n", "grid.n", c.n, a);
      c.length = r.number(g, "length", "grid.length", c.length, a, true);
      c.dim = r.count(g, "dim", "grid.dim", 1, a);
      if (c.n < 16 || c.n % 2) r.error("grid.n", "need an even number of at least 16 points", a);
      if (c.dim < 1 || c.dim > 3) r.error("grid.dim", "dimension must be 1, 2 or 3", a);
    }
  }
  c.mass = r.number(j, "mass", "mass", 1.0, 0, true);

  if (!j.contains("hbar")) {
    r.error("hbar", "missing hbar list");
  } else {
    c.hbars = r.numbers(j, "hbar", "hbar", {});
    if (c.hbars.empty()) r.error("hbar", "hbar list must not be empty");
    for (std::size_t i = 0; i < c.hbars.size(); ++i) {
      if (!(c.hbars[i] > 0.0)) r.error("hbar", "hbar values must be positive");
      if (i && !(c.hbars[i] < c.hbars[i - 1])) r.error("hbar", "hbar list must be strictly decreasing");
    }
  }
  c.times = r.numbers(j, "times", "times", {0.0});
  for (double t : c.times)
    if (!(t >= 0.0)) r.error("times", "times must be non-negative");

  if (j.contains("state") && j.contains("states")) r.error("states", "give either state or states, not both");
  if (j.contains("state"))
    c.states.push_back(read_state(r, j["state"], "state", r.locate("state"), c.dim));
  if (j.contains("states")) {
    if (!j["states"].is_array() || j["states"].empty()) {
      r.error("states", "expected a non-empty list");
    } else {
      const std::size_t a = r.locate("states");
      std::size_t i = 0, nth = 0;
      for (const auto& s : j["states"]) {
        const std::size_t anchor = r.object_start(r.locate("family", a, nth));
        c.states.push_back(read_state(r, s, "states[" + std::to_string(i) + "]", anchor, c.dim));
        nth += 1 + c.states.back().components.size();
        ++i;
      }
    }
  }
  if (c.states.empty() && !(c.kind == Kind::purity && j.contains("random_mixtures")))
    r.error("state", "at least one state is required");

  if (j.contains("potential")) {
    const auto& p = j["potential"];
    const std::size_t a = r.locate("potential");
    if (p.is_string()) {
      c.potential.kind = "expression";
      c.potential.expression = p.get<std::string>();
      r.expression(c.potential.expression, {"x", "hbar"}, "potential", a);
    } else if (p.is_object()) {
      r.unknown_keys(p, {"kind", "omega", "center", "strength", "expression"}, "potential.", a);
      c.potential.kind = r.string(p, "kind", "potential.kind", "zero", a);
      c.potential.omega = r.number(p, "omega", "potential.omega", 1.0, a, true);
      c.potential.center = r.number(p, "center", "potential.center", 0.0, a);
      c.potential.strength = r.number(p, "strength", "potential.strength", 1.0, a, true);
      c.potential.expression = r.string(p, "expression", "potential.expression", "", a);
      static const std::set<std::string> pk{"zero", "harmonic", "soft_harmonic", "expression"};
      if (!pk.count(c.potential.kind)) r.error("potential.kind", "unknown potential kind", a);
      if (c.potential.kind == "expression")
        r.expression(c.potential.expression, {"x", "hbar"}, "potential.expression", a);
    } else {
      r.error("potential", "expected an expression string or an object");
    }
  }

  if (j.contains("evolution")) {
    const auto& e = j["evolution"];
    const std::size_t a = r.locate("evolution");
    if (!e.is_object()) {
      r.error("evolution", "expected an object");
    } else {
      r.unknown_keys(e, {"dt", "t_final", "record_stride", "backend"}, "evolution.", a);
      c.evolution.dt = r.number(e, "dt", "evolution.dt", c.evolution.dt, a, true);
      c.evolution.t_final = r.number(e, "t_final", "evolution.t_final", c.evolution.t_final, a, true);
      c.evolution.record_stride = r.count(e, "record_stride", "evolution.record_stride", 1, a);
      c.evolution.backend = r.string(e, "backend", "evolution.backend", c.evolution.backend, a);
      if (c.evolution.record_stride == 0) r.error("evolution.record_stride", "must be at least 1", a);
      static const std::set<std::string> b{"schrodinger", "von_neumann", "wigner", "madelung"};
      if (!b.count(c.evolution.backend)) r.error("evolution.backend", "unknown backend", a);
      const double steps = c.evolution.t_final / c.evolution.dt;
      if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
        r.error("evolution.t_final", "t_final must be a whole number of time steps", a);
    }
  }

  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned())
      r.error("seed", "expected a non-negative integer");
    else
      c.seed = j["seed"].get<std::uint64_t>();
  }
  c.random_mixtures = r.count(j, "random_mixtures", "random_mixtures", 0);
  c.cutoff = r.string(j, "cutoff", "cutoff", c.cutoff);
  r.expression(c.cutoff, {"xi"}, "cutoff");
  c.sobolev_s = r.number(j, "sobolev_s", "sobolev_s", 0.25);
  c.beta = r.number(j, "beta", "beta", 0.0);
  c.order = r.count(j, "order", "order", 0);
  if (c.order > 2) r.error("order", "order must be 0, 1 or 2");
  c.coefficients = r.numbers(j, "coefficients", "coefficients", {});
  if (j.contains("dump_fields")) {
    if (!j["dump_fields"].is_boolean())
      r.error("dump_fields", "expected true or false");
    else
      c.dump_fields = j["dump_fields"].get<bool>();
  }
  for (const char* section : {"thresholds", "expect"}) {
    if (!j.contains(section)) continue;
    const std::size_t a = r.locate(section);
    if (!j[section].is_object()) {
      r.error(section, "expected an object of numbers");
      continue;
    }
    auto& dst = std::string(section) == "thresholds" ? c.thresholds : c.expect;
    for (auto it = j[section].begin(); it != j[section].end(); ++it) {
      if (!it->is_number())
        r.error(std::string(section) + "." + it.key(), "expected a number", a);
      else
        dst[it.key()] = it->get<double>();
    }
  }

  if (c.kind == Kind::sweep && c.hbars.size() < 2) r.error("hbar", "a sweep needs at least two hbar values");
  if (c.kind == Kind::averaging && c.hbars.size() < 4) r.error("hbar", "averaging needs at least four hbar values");
  if ((c.kind == Kind::density1d || c.kind == Kind::madelung || c.kind == Kind::averaging ||
       c.kind == Kind::purity) && c.dim != 1)
    r.error("grid.dim", std::string(to_string(c.kind)) + " experiments are one-dimensional", r.locate("grid"));
  if (c.kind == Kind::density1d && c.coefficients.size() != 2 * c.order + 1 && c.order > 0)
    r.error("coefficients", "a degree 2n potential needs 2n + 1 coefficients");

  if (out.size() != before) return std::nullopt;
  return c;
}

}  // namespace semiwig::cli
