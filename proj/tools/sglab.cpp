#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "sglab/lab.hpp"

namespace {

using namespace sglab;
using lab::ConfigError;

std::pair<std::uint64_t, std::uint64_t> parse_seeds(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw ConfigError("--seeds must look like A..B");
  try {
    std::size_t used = 0;
    const auto a = std::stoull(text.substr(0, dots), &used);
    if (used != dots) throw ConfigError("bad seed range");
    const std::string rest = text.substr(dots + 2);
    const auto b = std::stoull(rest, &used);
    if (used != rest.size()) throw ConfigError("bad seed range");
    return {a, b};
  } catch (const std::logic_error&) {
    throw ConfigError("--seeds must look like A..B with nonnegative integers");
  }
}

std::pair<std::size_t, std::size_t> parse_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("--window must look like first:count");
  try {
    return {std::stoull(text.substr(0, colon)), std::stoull(text.substr(colon + 1))};
  } catch (const std::logic_error&) {
    throw ConfigError("--window must look like first:count");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra, gaps, bounds and dynamics of the scrambled-cost adiabatic Hamiltonian"};
  app.set_version_flag("--version", std::string(lab::kVersion));

  lab::RunConfig cfg;
  std::string command;
  std::string seeds, perm = "random", grid, format = "csv", integrator = "magnus4";
  std::string window, save_table, config_file, times_text;
  double s_star = 0.0, c = 0.0, epsilon = 0.0;
  int k = 0;

  app.add_option("command", command,
                 "spectrum | min-gap | bounds | localize | theorem3 | evolve | mid-spectrum | "
                 "neighbor-stats | diagonal")
      ->required();
  app.add_option("--n", cfg.n, "bit count");
  app.add_option("--seed", cfg.seed, "permutation seed");
  app.add_option("--seeds", seeds, "inclusive seed range A..B");
  app.add_option("--perm", perm, "random | identity")->check(CLI::IsMember({"random", "identity"}));
  app.add_option("--s-grid", grid, "lo:hi:count");
  app.add_option("--levels", cfg.levels, "number of lowest levels");
  app.add_option("--tol", cfg.tol, "eigensolver residual tolerance");
  app.add_option("--out", cfg.out, "output path (stdout when omitted)");
  app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", cfg.threads, "worker threads (default $SGLAB_THREADS)");
  app.add_flag("--force-large", cfg.force_large, "lift the size caps");
  app.add_option("--load-table", cfg.load_table, "read the permutation from a table file");
  app.add_option("--save-table", save_table, "write the permutation of the first seed");
  app.add_option("--config", config_file, "rerun the config stored in a previous output");
  app.add_option("--coarse-step", cfg.coarse_step, "min-gap coarse grid step");
  app.add_option("--refine-tol", cfg.refine_tol, "min-gap refinement width in s");
  auto* o_s = app.add_option("--s-star", s_star, "bounds: ansatz s");
  auto* o_c = app.add_option("--c", c, "bounds: low-set fraction c");
  auto* o_k = app.add_option("--k", k, "bounds: ansatz k; neighbor-stats: cluster size");
  app.add_option("--entropy-target", cfg.entropy_target, "theorem3: f(c) target");
  app.add_option("--T", times_text, "evolve: comma-separated total times");
  app.add_option("--integrator", integrator, "magnus4 | midpoint")
      ->check(CLI::IsMember({"magnus4", "midpoint"}));
  app.add_option("--step-tol", cfg.step_tol, "evolve: local error per step");
  app.add_flag("--bound", cfg.with_bound, "evolve: add the adiabatic-theorem bound");
  auto* o_eps = app.add_option("--epsilon", epsilon, "evolve: report the time floor for epsilon");
  app.add_option("--window", window, "mid-spectrum: first:count");
  app.add_option("--gamma", cfg.gamma, "neighbor-stats: set size 2^(gamma n)");
  app.add_option("--trials", cfg.trials, "neighbor-stats: Monte Carlo trials");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  lab::Table table;
  try {
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw ConfigError("cannot open " + config_file);
      const std::string out = cfg.out;
      const int threads = cfg.threads;
      cfg = lab::load_config(in);
      cfg.out = out;
      cfg.threads = threads;
    } else {
      cfg.command = lab::parse_command(command);
      if (!seeds.empty()) cfg.seed_range = parse_seeds(seeds);
      cfg.perm = perm == "identity" ? PermutationKind::identity : PermutationKind::random;
      if (!grid.empty()) cfg.grid = lab::SGrid::parse(grid);
      cfg.format = format == "json" ? lab::OutputFormat::json : lab::OutputFormat::csv;
      cfg.scheme = integrator == "midpoint" ? Integrator::midpoint : Integrator::magnus4;
      if (*o_s) cfg.s_star = s_star;
      if (*o_c) cfg.c = c;
      if (*o_k) {
        if (cfg.command == lab::Command::neighbor_stats) {
          cfg.cluster_k = k;
        } else {
          cfg.k = k;
        }
      }
      if (*o_eps) cfg.epsilon = epsilon;
      if (!times_text.empty()) {
        cfg.times.clear();
        std::stringstream ss(times_text);
        for (std::string item; std::getline(ss, item, ',');) {
          try {
            cfg.times.push_back(std::stod(item));
          } catch (const std::logic_error&) {
            throw ConfigError("cannot parse T value '" + item + "'");
          }
        }
      }
      if (!window.empty()) {
        const auto [first, count] = parse_window(window);
        cfg.window_first = first;
        cfg.window_count = count;
      }
    }
    cfg.validate();

    if (!save_table.empty()) {
      const std::uint64_t seed = cfg.seeds().front();
      const ScrambleTable t = cfg.perm == PermutationKind::identity
                                  ? ScrambleTable::identity(cfg.n)
                                  : ScrambleTable::random(cfg.n, seed);
      std::ofstream out(save_table, std::ios::binary);
      if (!out) throw ConfigError("cannot write " + save_table);
      t.save(out);
    }
  } catch (const Error& e) {
    std::cerr << "sglab: " << e.what() << '\n';
    return 1;
  }

  try {
    table = lab::run(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "sglab: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "sglab: " << e.what() << '\n';
    return 2;
  }

  if (cfg.out.empty()) {
    lab::write(std::cout, cfg, table);
  } else {
    std::ofstream out(cfg.out);
    if (!out) {
      std::cerr << "sglab: cannot write " << cfg.out << '\n';
      return 1;
    }
    lab::write(out, cfg, table);
  }
  for (const auto& f : table.failures) std::cerr << "sglab: " << f << '\n';
  return table.failures.empty() ? 0 : 2;
}
