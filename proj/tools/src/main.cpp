// semiwig: run, validate and list experiment configs.
//
// Exit codes: 0 success, 1 a check or the numerics failed, 2 bad usage or schema violation.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "config.hpp"
#include "runner.hpp"
#include "semiwig/error.hpp"

namespace fs = std::filesystem;
using namespace semiwig::cli;

namespace {

fs::path default_config_dir() {
  if (const char* env = std::getenv("SEMIWIG_CONFIG_DIR")) return env;
  return SEMIWIG_CONFIG_DIR;
}

// A bare name resolves to <config dir>/<name>.json.
fs::path resolve(const std::string& arg, const fs::path& dir) {
  fs::path p(arg);
  if (fs::exists(p)) return p;
  if (!p.has_extension() && fs::exists(dir / (arg + ".json"))) return dir / (arg + ".json");
  return p;
}

std::size_t thread_count(const CLI::Option* flag, std::size_t flag_value) {
  if (flag->count()) return std::max<std::size_t>(1, flag_value);
  if (const char* env = std::getenv("SEMIWIG_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring SEMIWIG_THREADS=" << env << '\n';
  }
  return 1;
}

std::optional<ExperimentConfig> load_or_report(const fs::path& path) {
  std::vector<Diagnostic> diags;
  auto cfg = load_config(path, diags);
  for (const auto& d : diags) std::cerr << format(d, path) << '\n';
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semiwig experiment runner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SEMIWIG_VERSION);
  std::string config_dir = default_config_dir().string();
  app.add_option("--config-dir", config_dir, "Directory of bundled configs");

  std::string config, out;
  std::size_t threads = 1;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Run an experiment");
  run->add_option("--config", config, "Config file or bundled config name")->required();
  run->add_option("--out", out, "Output directory (default out/<name>)");
  auto* threads_opt = run->add_option("--threads", threads, "Worker threads (overrides SEMIWIG_THREADS)");
  auto* seed_opt = run->add_option("--seed", seed, "Seed for randomized corpora (overrides the config)");

  auto* validate = app.add_subcommand("validate", "Check a config without running numerics");
  validate->add_option("--config", config, "Config file or bundled config name")->required();

  auto* list = app.add_subcommand("list", "List bundled experiment configs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (list->parsed()) {
    std::vector<fs::path> files;
    if (fs::is_directory(config_dir))
      for (const auto& e : fs::directory_iterator(config_dir))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    int bad = 0;
    for (const auto& f : files) {
      std::vector<Diagnostic> diags;
      const auto cfg = load_config(f, diags);
      if (!cfg) {
        std::cout << f.stem().string() << "  <invalid>\n";
        ++bad;
        continue;
      }
      std::cout << cfg->name << "  [" << to_string(cfg->kind) << "]  " << cfg->description << '\n';
    }
    std::cout << files.size() << " configs in " << config_dir << '\n';
    return bad ? 2 : 0;
  }

  const fs::path path = resolve(config, config_dir);
  const auto cfg = load_or_report(path);
  if (!cfg) return 2;

  if (validate->parsed()) {
    std::cout << path.string() << ": ok (" << to_string(cfg->kind) << ", 0 diagnostics)\n";
    return 0;
  }

  RunOptions opts;
  opts.out = out.empty() ? fs::path("out") / cfg->name : fs::path(out);
  opts.seed = seed_opt->count() ? seed : cfg->seed;
  opts.threads = thread_count(threads_opt, threads);
  try {
    const auto result = run_experiment(*cfg, opts);
    for (const auto& n : result.notes) std::cout << "note: " << n << '\n';
    int failed = 0;
    for (const auto& c : result.checks) {
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.value << ' ' << c.relation << ' '
                << c.threshold << '\n';
      failed += !c.pass;
    }
    std::cout << "outputs in " << opts.out.string() << '\n';
    if (failed) {
      for (const auto& c : result.checks)
        if (!c.pass) std::cerr << "check failed: " << c.name << '\n';
      return 1;
    }
    return 0;
  } catch (const semiwig::Error& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return 1;
  }
}
