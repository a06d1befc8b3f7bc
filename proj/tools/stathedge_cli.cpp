#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "stathedge/config.hpp"
#include "stathedge/errors.hpp"
#include "stathedge/experiments.hpp"
#include "stathedge/parallel.hpp"

namespace {

using namespace stathedge;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config: return 2;
    case ErrorKind::Validation:
    case ErrorKind::RedundantInstrument: return 4;
    default: return 3;
  }
}

void print(const experiments::Report& r) {
  for (const auto& w : r.warnings) std::cout << "note: " << w << "\n";
  for (const auto& c : r.checks)
    std::cout << (c.ok ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  for (const auto& f : r.files) std::cout << "wrote " << f << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variance-optimal static hedging with bonds, forwards and vanilla options"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  int workers = -1;
  int which = 0;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* o = sub->add_option("--config", config_path, "TOML experiment config");
    if (config_required) o->required();
    o->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "Monte Carlo seed");
    sub->add_option("--workers", workers, "worker threads (0 = hardware concurrency)");
  };
  auto* hd = app.add_subcommand("hedge-discrete", "optimal portfolio over discrete strikes");
  auto* hc = app.add_subcommand("hedge-continuous", "optimal strike density over a band");
  auto* pr = app.add_subcommand("profile", "terminal payoff of the optimal portfolio");
  auto* va = app.add_subcommand("validate", "cross-engine and Monte Carlo checks");
  auto* fg = app.add_subcommand("figure", "data behind figures 1-4");
  for (auto* s : {hd, hc, pr, va}) add_common(s, true);
  add_common(fg, false);
  fg->add_option("which", which, "figure number")->required()->check(CLI::Range(1, 4));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    std::optional<config::ExperimentConfig> cfg;
    if (!config_path.empty()) cfg = config::parse_file(config_path);
    experiments::Context ctx;
    ctx.out_dir = !out_dir.empty() ? out_dir : (cfg ? cfg->output_dir : std::string("out"));
    ctx.seed = seed.value_or(cfg ? cfg->seed : 1);
    if (workers < 0) workers = cfg ? cfg->solver.workers : 0;
    if (workers == 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    set_default_workers(workers);
    ctx.workers = workers;

    experiments::Report r;
    if (*hd) r = experiments::hedge_discrete(*cfg, ctx);
    else if (*hc) r = experiments::hedge_continuous(*cfg, ctx);
    else if (*pr) r = experiments::profile(*cfg, ctx);
    else if (*va) r = experiments::validate(*cfg, ctx);
    else r = experiments::figure(which, ctx);
    print(r);
    if (!r.ok()) {
      std::cerr << "validation failed\n";
      return 4;
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
