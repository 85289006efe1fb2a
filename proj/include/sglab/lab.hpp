#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sglab/bitperm.hpp"
#include "sglab/dynamics.hpp"
#include "sglab/errors.hpp"

namespace sglab::lab {

inline constexpr std::string_view kVersion = "0.1.0";

/// Invalid command-line or config-file input. Maps to exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Command {
  spectrum,
  min_gap,
  bounds,
  localize,
  theorem3,
  evolve,
  mid_spectrum,
  neighbor_stats,
  diagonal,
};

Command parse_command(std::string_view name);
std::string_view command_name(Command c);

enum class OutputFormat { csv, json };

/// lo:hi:count, inclusive endpoints.
struct SGrid {
  double lo = 0.0;
  double hi = 1.0;
  int count = 101;

  static SGrid parse(std::string_view text);
  std::vector<double> points() const;
};

struct RunConfig {
  Command command = Command::spectrum;
  int n = 8;
  std::uint64_t seed = 1;
  /// Inclusive seed range from --seeds A..B; overrides seed when set.
  std::optional<std::pair<std::uint64_t, std::uint64_t>> seed_range;
  PermutationKind perm = PermutationKind::random;
  /// Empty means the command's own default grid.
  std::optional<SGrid> grid;
  int levels = 25;  // clamped to 2^n
  double tol = 1e-10;
  std::string out;  // empty writes to stdout
  OutputFormat format = OutputFormat::csv;
  int threads = 0;  // 0 reads SGLAB_THREADS, then the OpenMP default
  bool force_large = false;
  std::string load_table;

  // min-gap
  double coarse_step = 0.02;
  double refine_tol = 1e-6;

  // bounds: explicit ansatz parameters, otherwise s* = 1/2 + n^(-1/4)
  std::optional<double> s_star;
  std::optional<double> c;
  std::optional<int> k;

  // theorem3
  double entropy_target = 0.49;

  // evolve
  std::vector<double> times{100.0};
  Integrator scheme = Integrator::magnus4;
  double step_tol = 1e-9;
  bool with_bound = false;
  std::optional<double> epsilon;

  // mid-spectrum: first level index (default centers the window) and count
  std::optional<std::size_t> window_first;
  std::size_t window_count = 40;

  // neighbor-stats
  double gamma = 0.5;
  int cluster_k = 8;
  int trials = 500;

  std::vector<std::uint64_t> seeds() const;
  std::vector<double> s_points() const;
  SGrid effective_grid() const;

  /// Throws ConfigError; called before any large allocation.
  void validate() const;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
};

/// Rows of a command's output plus per-run failures and a summary object.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::string> failures;
};

Table run(const RunConfig& config);

/// CSV: '#' metadata lines (config, generator, summary, failures), header,
/// rows with 17 significant digits. JSON: {config, generator, data, summary, failures}.
void write(std::ostream& out, const RunConfig& config, const Table& table);

/// Reads a config from a previous JSON output (its "config" member), a bare
/// config object, or the "# config:" line of a CSV output.
RunConfig load_config(std::istream& in);

/// Thread count after the SGLAB_THREADS fallback.
int resolve_threads(int requested);

struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};
/// Linear interpolation between order statistics.
Quartiles quartiles(std::vector<double> values);

}  // namespace sglab::lab
