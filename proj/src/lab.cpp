#include "sglab/lab.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iterator>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>

#include "sglab/bounds.hpp"
#include "sglab/eigensolve.hpp"

namespace sglab::lab {

using nlohmann::json;

namespace {

constexpr struct {
  Command command;
  std::string_view name;
} kCommands[] = {
    {Command::spectrum, "spectrum"},         {Command::min_gap, "min-gap"},
    {Command::bounds, "bounds"},             {Command::localize, "localize"},
    {Command::theorem3, "theorem3"},         {Command::evolve, "evolve"},
    {Command::mid_spectrum, "mid-spectrum"}, {Command::neighbor_stats, "neighbor-stats"},
    {Command::diagonal, "diagonal"},
};

double parse_double(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  }
  return v;
}

std::string bit_string(State z, int n) {
  std::string out(static_cast<std::size_t>(n), '0');
  for (int i = 0; i < n; ++i) {
    if ((z >> i) & 1U) out[static_cast<std::size_t>(n - 1 - i)] = '1';
  }
  return out;
}

std::string gib(double bytes) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f GiB", bytes / (1024.0 * 1024.0 * 1024.0));
  return buf;
}

std::string format_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + '"';
  }
  return v.dump();
}

ScrambleTable make_table(const RunConfig& config, std::uint64_t seed) {
  if (!config.load_table.empty()) {
    std::ifstream in(config.load_table, std::ios::binary);
    if (!in) throw ConfigError("cannot open table file " + config.load_table);
    ScrambleTable t = ScrambleTable::load(in);
    if (t.bits() != config.n) {
      throw ConfigError("table file has n=" + std::to_string(t.bits()) + " but --n is " +
                        std::to_string(config.n));
    }
    return t;
  }
  if (config.perm == PermutationKind::identity) return ScrambleTable::identity(config.n);
  return ScrambleTable::random(config.n, seed);
}

SolverLimits limits_of(const RunConfig& config) {
  SolverLimits l;
  l.force_large = config.force_large;
  return l;
}

// Runs f(i) for i in [0, count). Each failure is recorded in its slot; the
// outer loop takes the threads and inner kernels stay serial.
void fan_out(std::size_t count, int threads, std::vector<std::string>& errors,
             const std::function<void(std::size_t)>& f) {
  errors.assign(count, {});
  auto guarded = [&](std::size_t i) {
    try {
      f(i);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  };
  if (count <= 1 || threads <= 1) {
    omp_set_num_threads(std::max(1, threads));
    for (std::size_t i = 0; i < count; ++i) guarded(i);
    return;
  }
  omp_set_max_active_levels(1);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long i = 0; i < static_cast<long>(count); ++i) guarded(static_cast<std::size_t>(i));
}

struct Ensemble {
  std::vector<std::uint64_t> seeds;
  std::vector<ScrambleTable> tables;
  std::vector<AdiabaticOperator> ops;
};

Ensemble build_ensemble(const RunConfig& config) {
  Ensemble e;
  e.seeds = config.seeds();
  for (std::uint64_t seed : e.seeds) {
    e.tables.push_back(make_table(config, seed));
    e.ops.emplace_back(e.tables.back());
  }
  return e;
}

// Collects per-task rows and failures in task order.
struct Collector {
  std::vector<std::vector<std::vector<json>>> rows;
  std::vector<std::string> errors;

  explicit Collector(std::size_t count) : rows(count) {}

  void merge_into(Table& table, const std::function<std::string(std::size_t)>& label) const {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!errors[i].empty()) {
        table.failures.push_back(label(i) + ": " + errors[i]);
        continue;
      }
      for (const auto& r : rows[i]) table.rows.push_back(r);
    }
  }
};

std::string seed_s_label(const Ensemble& e, const std::vector<double>& grid, std::size_t i) {
  const std::size_t seed_index = i / grid.size();
  char buf[64];
  std::snprintf(buf, sizeof buf, "seed %llu s=%.6g",
                static_cast<unsigned long long>(e.seeds[seed_index]), grid[i % grid.size()]);
  return buf;
}

Table run_spectrum(const RunConfig& config, int threads) {
  const Ensemble e = build_ensemble(config);
  const std::vector<double> grid = config.s_points();
  Collector c(e.seeds.size() * grid.size());
  fan_out(c.rows.size(), threads, c.errors, [&](std::size_t i) {
    const auto& op = e.ops[i / grid.size()];
    const double s = grid[i % grid.size()];
    const auto levels = std::min(static_cast<std::size_t>(config.levels), op.dim());
    SpectrumSlice slice;
    if (op.dim() <= 512) {
      slice = dense_spectrum(op, s, false, limits_of(config));
      slice.eigenvalues.resize(levels);
      slice.residual_norms.resize(levels);
    } else {
      LanczosOptions opts;
      opts.limits = limits_of(config);
      slice = lowest_k(op, s, static_cast<int>(levels), config.tol, opts);
    }
    for (std::size_t l = 0; l < slice.eigenvalues.size(); ++l) {
      c.rows[i].push_back({e.seeds[i / grid.size()], s, l, slice.eigenvalues[l],
                           slice.residual_norms[l]});
    }
  });
  Table t;
  t.columns = {"seed", "s", "level", "eigenvalue", "residual"};
  c.merge_into(t, [&](std::size_t i) { return seed_s_label(e, grid, i); });
  return t;
}

Table run_min_gap(const RunConfig& config, int threads) {
  const Ensemble e = build_ensemble(config);
  const SGrid range = config.grid.value_or(SGrid{0.0, 1.0, 2});
  Collector c(e.seeds.size());
  fan_out(c.rows.size(), threads, c.errors, [&](std::size_t i) {
    MinGapOptions opts;
    opts.s_lo = range.lo;
    opts.s_hi = range.hi;
    opts.coarse_step = config.coarse_step;
    opts.refine_tol = config.refine_tol;
    opts.solver_tol = config.tol;
    opts.limits = limits_of(config);
    const GapResult r = min_gap(e.ops[i], opts);
    c.rows[i].push_back({config.n, e.seeds[i], r.s_min, r.gap, r.bracket.first, r.bracket.second,
                         r.profile.size()});
  });
  Table t;
  t.columns = {"n", "seed", "s_min", "gap", "bracket_lo", "bracket_hi", "evaluations"};
  c.merge_into(t, [&](std::size_t i) { return "seed " + std::to_string(e.seeds[i]); });

  std::vector<double> gaps;
  for (const auto& r : t.rows) gaps.push_back(r[3].get<double>());
  t.summary["seeds"] = e.seeds.size();
  t.summary["succeeded"] = gaps.size();
  if (!gaps.empty()) {
    const Quartiles q = quartiles(gaps);
    t.summary["gap_q1"] = q.q1;
    t.summary["gap_median"] = q.median;
    t.summary["gap_q3"] = q.q3;
  }
  return t;
}

Table run_bounds(const RunConfig& config, int threads) {
  const Ensemble e = build_ensemble(config);
  const std::vector<double> grid = config.s_points();
  const int n = config.n;
  const double shrink = 1.0 - 5.0 * std::pow(static_cast<double>(n), -0.25);

  struct Lower {
    std::optional<AnsatzParameters> params;
    CwBound cw;
    std::string regime_error;
  };
  std::vector<Lower> lower(e.seeds.size());
  std::vector<std::string> lower_errors;
  fan_out(e.seeds.size(), threads, lower_errors, [&](std::size_t i) {
    try {
      const AnsatzParameters p = config.s_star
                                     ? ansatz_parameters(n, *config.s_star, *config.c, *config.k)
                                     : lemma_parameters(n);
      const Ansatz a = build_ansatz_A(e.tables[i], p);
      lower[i].cw = cw_lower(e.ops[i], p.s, a.state);
      lower[i].params = p;
    } catch (const ParameterRegimeError& err) {
      lower[i].regime_error = err.what();
    }
  });

  Collector c(e.seeds.size() * grid.size());
  fan_out(c.rows.size(), threads, c.errors, [&](std::size_t i) {
    const std::size_t si = i / grid.size();
    const auto& op = e.ops[si];
    const double s = grid[i % grid.size()];
    if (!lower_errors[si].empty()) throw Error(lower_errors[si]);
    const double e0 = ground_state(op, s, config.tol, limits_of(config)).energy;
    const double upper =
        std::min(variational_upper(op, s, Amplitudes::uniform(n)),
                 variational_upper(op, s, Amplitudes::basis(n, e.tables[si].target())));
    const double ec = e_curve(s);
    json lo = nullptr, cc = nullptr, kk = nullptr, lam = nullptr, arg = nullptr, sandwich = nullptr;
    if (const auto& p = lower[si].params) {
      // E(s) is concave with E(0) = E(1) = 0, so the bound at s* extends linearly.
      const double l = lower[si].cw.value * std::min(s / p->s, (1.0 - s) / (1.0 - p->s));
      lo = l;
      cc = p->c;
      kk = p->k;
      lam = p->lambda;
      arg = bit_string(lower[si].cw.argmin, n);
      sandwich = l <= e0 + 1e-9 && e0 <= upper + 1e-9;
    }
    c.rows[i].push_back({e.seeds[si], s, e0, lo, upper, ec, e0 / n <= ec + 1e-12,
                         e0 / n >= ec * shrink, sandwich, cc, kk, lam, arg});
  });

  Table t;
  t.columns = {"seed",  "s",  "E0",        "lower", "upper",  "e_curve",       "upper_ok",
               "curve_lower_ok", "sandwich_ok", "c", "k", "lambda_or_mu", "argmin_string"};
  c.merge_into(t, [&](std::size_t i) { return seed_s_label(e, grid, i); });

  std::size_t upper_ok = 0;
  std::size_t lower_ok = 0;
  for (const auto& r : t.rows) {
    upper_ok += r[6].get<bool>();
    lower_ok += r[7].get<bool>();
  }
  t.summary["points"] = t.rows.size();
  t.summary["upper_ok"] = upper_ok;
  t.summary["curve_lower_ok"] = lower_ok;
  json ansatz = json::array();
  for (std::size_t i = 0; i < e.seeds.size(); ++i) {
    json a = {{"seed", e.seeds[i]}};
    if (const auto& p = lower[i].params) {
      a["s_star"] = p->s;
      a["cw_value"] = lower[i].cw.value;
      a["ansatz_floor"] = ansatz_floor(n, *p);
      a["lemma_target"] = lemma_target(n, p->s);
    } else {
      a["regime_error"] = lower[i].regime_error;
    }
    ansatz.push_back(std::move(a));
  }
  t.summary["ansatz"] = std::move(ansatz);
  return t;
}

Table run_localize(const RunConfig& config, int threads) {
  const Ensemble e = build_ensemble(config);
  const std::vector<double> grid = config.s_points();
  Collector c(e.seeds.size() * grid.size());
  fan_out(c.rows.size(), threads, c.errors, [&](std::size_t i) {
    const std::size_t si = i / grid.size();
    const double s = grid[i % grid.size()];
    const GroundState gs = ground_state(e.ops[si], s, config.tol, limits_of(config));
    const auto psi = gs.vector.data();
    const double sum = std::accumulate(psi.begin(), psi.end(), 0.0);
    double ipr = 0.0;
    for (double x : psi) ipr += x * x * x * x;
    const double target = psi[e.tables[si].target()];
    c.rows[i].push_back({e.seeds[si], s, gs.energy, sum * sum / static_cast<double>(psi.size()),
                         target * target, ipr});
  });
  Table t;
  t.columns = {"seed", "s", "energy", "overlap_uniform", "overlap_target", "ipr"};
  c.merge_into(t, [&](std::size_t i) { return seed_s_label(e, grid, i); });

  json crossings = json::array();
  for (std::uint64_t seed : e.seeds) {
    json cross = nullptr;
    const std::vector<json>* prev = nullptr;
    for (const auto& r : t.rows) {
      if (r[0].get<std::uint64_t>() != seed) continue;
      const double ipr = r[5].get<double>();
      if (prev != nullptr && (*prev)[5].get<double>() < 0.5 && ipr >= 0.5) {
        const double s0 = (*prev)[1].get<double>();
        const double i0 = (*prev)[5].get<double>();
        const double s1 = r[1].get<double>();
        cross = s0 + (0.5 - i0) * (s1 - s0) / (ipr - i0);
        break;
      }
      prev = &r;
    }
    crossings.push_back({{"seed", seed}, {"ipr_half_crossing", cross}});
  }
  t.summary["ipr_crossings"] = std::move(crossings);
  return t;
}

Table run_theorem3(const RunConfig& config, int threads) {
  const Ensemble e = build_ensemble(config);
  const std::vector<double> grid = config.s_points();
  const int n = config.n;
  const double c = solve_c(config.entropy_target);
  Collector col(e.seeds.size() * grid.size());
  fan_out(col.rows.size(), threads, col.errors, [&](std::size_t i) {
    const std::size_t si = i / grid.size();
    const double s = grid[i % grid.size()];
    const double measured = gap(e.ops[si], s, config.tol, limits_of(config));
    json e1 = nullptr, e0 = nullptr, lower = nullptr, additive = nullptr;
    if (s == 1.0) {
      e1 = 1.0;
      e0 = 0.0;
      lower = 1.0;
      additive = first_excited_additive_term(1.0, c);
    } else if (s > 1.0 / (1.0 + 2.0 * c)) {
      const TrialState chi = build_chi(e.tables[si], s, c);
      const double e1v = first_excited_lower(e.ops[si], s, chi).value;
      const double e0v = 0.5 * (1.0 - s) * n;
      e1 = e1v;
      e0 = e0v;
      lower = e1v - e0v;
      additive = chi_floor_term(s, c);
    }
    col.rows[i].push_back({e.seeds[si], s, measured, e1, e0, lower, additive});
  });
  Table t;
  t.columns = {"seed", "s", "gap", "e1_lower", "e0_upper", "gap_lower", "additive_term"};
  col.merge_into(t, [&](std::size_t i) { return seed_s_label(e, grid, i); });

  json per_seed = json::array();
  std::size_t above = 0;
  for (std::uint64_t seed : e.seeds) {
    double m = INFINITY;
    for (const auto& r : t.rows) {
      if (r[0].get<std::uint64_t>() == seed) m = std::min(m, r[2].get<double>());
    }
    if (!std::isfinite(m)) continue;
    above += m > 0.8;
    per_seed.push_back({{"seed", seed}, {"min_gap", m}});
  }
  t.summary["c"] = c;
  t.summary["additive_term_at_0.9"] = first_excited_additive_term(0.9, c);
  t.summary["seeds_min_gap_above_0.8"] = above;
  t.summary["per_seed"] = std::move(per_seed);
  return t;
}

Table run_evolve(const RunConfig& config, int threads) {
  const Ensemble e = build_ensemble(config);
  const int n = config.n;
  std::vector<std::vector<std::pair<double, double>>> profiles(e.seeds.size());
  std::vector<std::string> profile_errors(e.seeds.size());
  if (config.with_bound) {
    const std::vector<double> grid = config.s_points();
    Collector pc(e.seeds.size() * grid.size());
    std::vector<double> gaps(pc.rows.size());
    fan_out(pc.rows.size(), threads, pc.errors, [&](std::size_t i) {
      gaps[i] = gap(e.ops[i / grid.size()], grid[i % grid.size()], config.tol, limits_of(config));
    });
    for (std::size_t i = 0; i < pc.rows.size(); ++i) {
      const std::size_t si = i / grid.size();
      if (!pc.errors[i].empty()) profile_errors[si] = pc.errors[i];
      profiles[si].emplace_back(grid[i % grid.size()], gaps[i]);
    }
  }

  const auto& times = config.times;
  Collector c(e.seeds.size() * times.size());
  fan_out(c.rows.size(), threads, c.errors, [&](std::size_t i) {
    const std::size_t si = i / times.size();
    const double T = times[i % times.size()];
    StepControl control;
    control.scheme = config.scheme;
    control.tolerance = config.step_tol;
    control.force_large = config.force_large;
    const EvolutionResult r = evolve(e.ops[si], T, control);
    json infidelity = nullptr, bound = nullptr;
    if (config.with_bound) {
      if (!profile_errors[si].empty()) throw Error(profile_errors[si]);
      infidelity = std::sqrt(std::max(0.0, 1.0 - r.success_probability));
      bound = adiabatic_bound(n, profiles[si], T);
    }
    c.rows[i].push_back({n, e.seeds[si], T, r.success_probability, r.norm_drift, r.steps,
                         r.rejected, infidelity, bound});
  });
  Table t;
  t.columns = {"n",     "seed",     "T",          "success_probability", "norm_drift",
               "steps", "rejected", "infidelity", "adiabatic_bound"};
  c.merge_into(t, [&](std::size_t i) {
    return "seed " + std::to_string(e.seeds[i / times.size()]) +
           " T=" + std::to_string(times[i % times.size()]);
  });
  if (config.epsilon) {
    json floors = json::array();
    for (std::size_t i = 0; i < e.seeds.size(); ++i) {
      const TimeFloor f = grover_time_floor(*config.epsilon, n, e.tables[i]);
      floors.push_back({{"seed", e.seeds[i]}, {"T_min", f.T_min}, {"applies", f.applies}});
    }
    t.summary["time_floor"] = std::move(floors);
  }
  return t;
}

Table run_mid_spectrum(const RunConfig& config, int threads) {
  const Ensemble e = build_ensemble(config);
  const std::vector<double> grid = config.s_points();
  const std::size_t dim = std::size_t{1} << config.n;
  const std::size_t first = config.window_first.value_or((dim - config.window_count) / 2);
  // Dense matrices dominate memory; run one at a time above 2^11.
  const int workers = config.n > 11 ? 1 : threads;
  Collector c(e.seeds.size() * grid.size());
  fan_out(c.rows.size(), workers, c.errors, [&](std::size_t i) {
    const double s = grid[i % grid.size()];
    const SpectrumSlice slice =
        mid_spectrum(e.ops[i / grid.size()], s, first, config.window_count, limits_of(config));
    for (std::size_t l = 0; l < slice.eigenvalues.size(); ++l) {
      c.rows[i].push_back({e.seeds[i / grid.size()], s, slice.first_index + l, slice.eigenvalues[l]});
    }
  });
  Table t;
  t.columns = {"seed", "s", "level", "eigenvalue"};
  c.merge_into(t, [&](std::size_t i) { return seed_s_label(e, grid, i); });
  return t;
}

Table run_neighbor_stats(const RunConfig& config, int threads) {
  const int n = config.n;
  const std::size_t dim = std::size_t{1} << n;
  const auto set_size = std::min(
      dim, static_cast<std::size_t>(std::floor(std::exp2(config.gamma * n) + 1e-9)));
  const std::uint64_t base = config.seeds().front();
  const auto trials = static_cast<std::size_t>(config.trials);
  std::vector<std::uint8_t> p_event(trials);
  std::vector<std::uint8_t> q_event(trials);
  std::vector<std::string> errors;
  fan_out(trials, threads, errors, [&](std::size_t i) {
    const ScrambleTable table = ScrambleTable::random(n, base + i);
    const auto image = table.forward_map().subspan(0, set_size);
    p_event[i] = neighbor_cluster_exists(image, n, config.cluster_k, true);
    q_event[i] = neighbor_cluster_exists(image, n, config.cluster_k, false);
  });
  Table t;
  for (std::size_t i = 0; i < trials; ++i) {
    if (!errors[i].empty()) t.failures.push_back("trial " + std::to_string(i) + ": " + errors[i]);
  }
  const std::size_t done = trials - t.failures.size();
  const double p_count = std::accumulate(p_event.begin(), p_event.end(), 0.0);
  const double q_count = std::accumulate(q_event.begin(), q_event.end(), 0.0);
  const double bound = p_bound(n, config.cluster_k, std::log2(static_cast<double>(set_size)) / n);
  const double p = done ? p_count / done : 0.0;
  const double q = done ? q_count / done : 0.0;
  const double sigma = done ? std::sqrt(std::min(bound, 1.0) * (1.0 - std::min(bound, 1.0)) / done) : 0.0;
  t.columns = {"n",     "set_size",    "k",           "trials", "p_count", "q_count",
               "empirical_p", "empirical_q", "bound", "bound_sigma"};
  t.rows.push_back({n, set_size, config.cluster_k, done, p_count, q_count, p, q, bound, sigma});
  return t;
}

Table run_diagonal(const RunConfig& config) {
  const ScrambleTable table = make_table(config, config.seeds().front());
  Table t;
  t.columns = {"z", "cost"};
  for (State z = 0; z < table.size(); ++z) t.rows.push_back({z, table.cost(z)});
  return t;
}

SGrid default_grid(Command c) {
  switch (c) {
    case Command::bounds:
    case Command::mid_spectrum:
      return {0.0, 1.0, 21};
    case Command::theorem3:
      return {0.9, 1.0, 21};
    default:
      return {0.0, 1.0, 101};
  }
}

}  // namespace

Command parse_command(std::string_view name) {
  for (const auto& c : kCommands) {
    if (c.name == name) return c.command;
  }
  throw ConfigError("unknown command '" + std::string(name) + "'");
}

std::string_view command_name(Command c) {
  for (const auto& k : kCommands) {
    if (k.command == c) return k.name;
  }
  return "?";
}

SGrid SGrid::parse(std::string_view text) {
  const auto a = text.find(':');
  const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
  if (b == std::string_view::npos) throw ConfigError("s-grid must look like lo:hi:count");
  SGrid g;
  g.lo = parse_double(text.substr(0, a), "s-grid lo");
  g.hi = parse_double(text.substr(a + 1, b - a - 1), "s-grid hi");
  const double count = parse_double(text.substr(b + 1), "s-grid count");
  if (count != std::floor(count) || count < 1 || count > 1e6) {
    throw ConfigError("s-grid count must be a positive integer");
  }
  g.count = static_cast<int>(count);
  return g;
}

std::vector<double> SGrid::points() const {
  if (count == 1) return {lo};
  return linear_grid(lo, hi, count);
}

std::vector<std::uint64_t> RunConfig::seeds() const {
  if (perm == PermutationKind::identity || !load_table.empty()) return {seed_range ? seed_range->first : seed};
  if (!seed_range) return {seed};
  std::vector<std::uint64_t> out;
  for (std::uint64_t s = seed_range->first;; ++s) {
    out.push_back(s);
    if (s == seed_range->second) break;
  }
  return out;
}

SGrid RunConfig::effective_grid() const { return grid.value_or(default_grid(command)); }

std::vector<double> RunConfig::s_points() const { return effective_grid().points(); }

void RunConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (n < 1 || n > kMaxTableBits) fail("n must lie in [1, " + std::to_string(kMaxTableBits) + "]");
  if (seed_range) {
    if (seed_range->first > seed_range->second) fail("seed range must satisfy A <= B");
    if (seed_range->second - seed_range->first >= 1000000) fail("seed range is limited to 10^6 seeds");
  }
  if (grid) {
    if (!(grid->lo >= 0.0 && grid->hi <= 1.0 && grid->lo <= grid->hi)) {
      fail("s-grid needs 0 <= lo <= hi <= 1");
    }
    if (grid->count < 1) fail("s-grid count must be positive");
  }
  const double dim = std::exp2(n);
  if (levels < 1) fail("levels must be positive");
  if (!(tol > 0.0 && tol < 1.0)) fail("tol must lie in (0, 1)");
  if (threads < 0) fail("threads must be nonnegative");

  const double vector_bytes = 8.0 * dim;
  auto cap = [&](int bits, const std::string& what, double bytes) {
    if (n > bits && !force_large) {
      fail("n=" + std::to_string(n) + " exceeds the " + what + " cap of " + std::to_string(bits) +
           " bits (needs about " + gib(bytes) + "); pass --force-large to override");
    }
  };
  switch (command) {
    case Command::spectrum:
    case Command::bounds:
    case Command::localize:
    case Command::theorem3:
    case Command::min_gap:
      cap(20, "Krylov", vector_bytes * (std::max(3.0 * levels + 20.0, 60.0) + levels));
      break;
    case Command::evolve:
      cap(20, "dynamics", vector_bytes * 2.0 * 40.0);
      break;
    case Command::mid_spectrum:
      cap(13, "dense", vector_bytes * dim);
      break;
    case Command::diagonal:
      cap(16, "diagonal dump", 16.0 * dim);
      break;
    case Command::neighbor_stats:
      break;
  }

  if (command == Command::min_gap) {
    if (!(coarse_step > 0.0 && coarse_step <= 1.0)) fail("coarse step must lie in (0, 1]");
    if (!(refine_tol > 0.0)) fail("refine tolerance must be positive");
    if (grid && !(grid->hi > grid->lo)) fail("min-gap needs lo < hi");
  }
  if (command == Command::min_gap || command == Command::theorem3) {
    if (n < 1 || dim < 2) fail("gap needs n >= 1");
  }
  if (command == Command::bounds) {
    const int given = static_cast<int>(s_star.has_value()) + c.has_value() + k.has_value();
    if (given != 0 && given != 3) fail("--s-star, --c and --k must be given together");
  }
  if (command == Command::theorem3 && !(entropy_target > 0.0 && entropy_target < 1.0)) {
    fail("entropy target must lie in (0, 1)");
  }
  if (command == Command::evolve) {
    if (times.empty()) fail("evolve needs at least one T");
    for (double T : times) {
      if (!(T > 0.0) || !std::isfinite(T)) fail("evolution times must be positive");
    }
    if (!(step_tol > 0.0)) fail("step tolerance must be positive");
    if (epsilon && !(*epsilon > 0.0 && *epsilon <= 1.0)) fail("epsilon must lie in (0, 1]");
    if (with_bound) {
      const SGrid g = effective_grid();
      if (g.lo != 0.0 || g.hi != 1.0 || g.count < 2) fail("--bound needs an s-grid spanning 0:1");
    }
  }
  if (command == Command::mid_spectrum) {
    if (window_count < 1) fail("window count must be positive");
    const std::size_t d = std::size_t{1} << n;
    if (window_count > d) fail("window is larger than the spectrum");
    if (window_first && *window_first + window_count > d) fail("window exceeds the spectrum");
  }
  if (command == Command::neighbor_stats) {
    if (!(gamma > 0.0 && gamma <= 1.0)) fail("gamma must lie in (0, 1]");
    if (cluster_k < 2) fail("k must be at least 2");
    if (trials < 1) fail("trials must be positive");
  }
}

json RunConfig::to_json() const {
  json j;
  j["command"] = command_name(command);
  j["n"] = n;
  j["seed"] = seed;
  j["seeds"] = seed_range ? json::array({seed_range->first, seed_range->second}) : json(nullptr);
  j["perm"] = perm == PermutationKind::identity ? "identity" : "random";
  const SGrid g = effective_grid();
  j["s_grid"] = {{"lo", g.lo}, {"hi", g.hi}, {"count", g.count}};
  j["levels"] = levels;
  j["tol"] = tol;
  j["format"] = format == OutputFormat::csv ? "csv" : "json";
  j["threads"] = threads;
  j["force_large"] = force_large;
  j["load_table"] = load_table;
  j["coarse_step"] = coarse_step;
  j["refine_tol"] = refine_tol;
  j["s_star"] = s_star ? json(*s_star) : json(nullptr);
  j["c"] = c ? json(*c) : json(nullptr);
  j["k"] = k ? json(*k) : json(nullptr);
  j["entropy_target"] = entropy_target;
  j["T"] = times;
  j["integrator"] = scheme == Integrator::magnus4 ? "magnus4" : "midpoint";
  j["step_tol"] = step_tol;
  j["bound"] = with_bound;
  j["epsilon"] = epsilon ? json(*epsilon) : json(nullptr);
  j["window_first"] = window_first ? json(*window_first) : json(nullptr);
  j["window_count"] = window_count;
  j["gamma"] = gamma;
  j["cluster_k"] = cluster_k;
  j["trials"] = trials;
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig r;
  try {
    r.command = parse_command(j.at("command").get<std::string>());
    r.n = j.value("n", r.n);
    r.seed = j.value("seed", r.seed);
    if (j.contains("seeds") && !j["seeds"].is_null()) {
      r.seed_range = {j["seeds"].at(0).get<std::uint64_t>(), j["seeds"].at(1).get<std::uint64_t>()};
    }
    r.perm = j.value("perm", std::string("random")) == "identity" ? PermutationKind::identity
                                                                   : PermutationKind::random;
    if (j.contains("s_grid")) {
      const auto& g = j["s_grid"];
      r.grid = SGrid{g.at("lo").get<double>(), g.at("hi").get<double>(), g.at("count").get<int>()};
    }
    r.levels = j.value("levels", r.levels);
    r.tol = j.value("tol", r.tol);
    r.format = j.value("format", std::string("csv")) == "json" ? OutputFormat::json : OutputFormat::csv;
    r.threads = j.value("threads", r.threads);
    r.force_large = j.value("force_large", r.force_large);
    r.load_table = j.value("load_table", r.load_table);
    r.coarse_step = j.value("coarse_step", r.coarse_step);
    r.refine_tol = j.value("refine_tol", r.refine_tol);
    if (j.contains("s_star") && !j["s_star"].is_null()) r.s_star = j["s_star"].get<double>();
    if (j.contains("c") && !j["c"].is_null()) r.c = j["c"].get<double>();
    if (j.contains("k") && !j["k"].is_null()) r.k = j["k"].get<int>();
    r.entropy_target = j.value("entropy_target", r.entropy_target);
    if (j.contains("T")) r.times = j["T"].get<std::vector<double>>();
    r.scheme = j.value("integrator", std::string("magnus4")) == "midpoint" ? Integrator::midpoint
                                                                          : Integrator::magnus4;
    r.step_tol = j.value("step_tol", r.step_tol);
    r.with_bound = j.value("bound", r.with_bound);
    if (j.contains("epsilon") && !j["epsilon"].is_null()) r.epsilon = j["epsilon"].get<double>();
    if (j.contains("window_first") && !j["window_first"].is_null()) {
      r.window_first = j["window_first"].get<std::size_t>();
    }
    r.window_count = j.value("window_count", r.window_count);
    r.gamma = j.value("gamma", r.gamma);
    r.cluster_k = j.value("cluster_k", r.cluster_k);
    r.trials = j.value("trials", r.trials);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return r;
}

RunConfig load_config(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  const auto start = text.find_first_not_of(" \t\r\n");
  if (start != std::string::npos && text[start] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    return RunConfig::from_json(j.contains("config") ? j["config"] : j);
  }
  std::istringstream lines(text);
  const std::string prefix = "# config: ";
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind(prefix, 0) == 0) {
      try {
        return RunConfig::from_json(json::parse(line.substr(prefix.size())));
      } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config line: ") + e.what());
      }
    }
  }
  throw ConfigError("no config found in file");
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SGLAB_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return omp_get_max_threads();
}

Quartiles quartiles(std::vector<double> values) {
  if (values.empty()) throw DomainError("quartiles of an empty sample");
  std::sort(values.begin(), values.end());
  auto at = [&](double p) {
    const double h = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return {at(0.25), at(0.5), at(0.75)};
}

Table run(const RunConfig& config) {
  config.validate();
  const int threads = resolve_threads(config.threads);
  switch (config.command) {
    case Command::spectrum:
      return run_spectrum(config, threads);
    case Command::min_gap:
      return run_min_gap(config, threads);
    case Command::bounds:
      return run_bounds(config, threads);
    case Command::localize:
      return run_localize(config, threads);
    case Command::theorem3:
      return run_theorem3(config, threads);
    case Command::evolve:
      return run_evolve(config, threads);
    case Command::mid_spectrum:
      return run_mid_spectrum(config, threads);
    case Command::neighbor_stats:
      return run_neighbor_stats(config, threads);
    case Command::diagonal:
      return run_diagonal(config);
  }
  throw ConfigError("unhandled command");
}

void write(std::ostream& out, const RunConfig& config, const Table& table) {
  const json generator = {{"id", kGeneratorId}, {"version", kGeneratorVersion}, {"sglab", kVersion}};
  if (config.format == OutputFormat::json) {
    json data = json::array();
    for (const auto& r : table.rows) {
      json obj = json::object();
      for (std::size_t c = 0; c < table.columns.size(); ++c) obj[table.columns[c]] = r[c];
      data.push_back(std::move(obj));
    }
    json doc = {{"config", config.to_json()},
                {"generator", generator},
                {"data", std::move(data)},
                {"summary", table.summary},
                {"failures", table.failures}};
    out << doc.dump(2) << '\n';
    return;
  }
  out << "# sglab " << kVersion << ' ' << command_name(config.command) << '\n';
  out << "# generator: " << generator.dump() << '\n';
  out << "# config: " << config.to_json().dump() << '\n';
  if (!table.summary.empty()) out << "# summary: " << table.summary.dump() << '\n';
  for (const auto& f : table.failures) out << "# failure: " << f << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? "," : "") << table.columns[c];
  }
  out << '\n';
  for (const auto& r : table.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << format_cell(r[c]);
    out << '\n';
  }
}

}  // namespace sglab::lab
