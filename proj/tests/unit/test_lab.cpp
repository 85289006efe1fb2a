#include <cmath>
#include <sstream>

#include "doctest.h"
#include "sglab/lab.hpp"

using namespace sglab;
using namespace sglab::lab;

namespace {

std::string render(const RunConfig& config) {
  std::ostringstream out;
  write(out, config, run(config));
  return out.str();
}

std::string data_section(const std::string& csv) {
  std::istringstream in(csv);
  std::string out;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind('#', 0) != 0) out += line + '\n';
  }
  return out;
}

}  // namespace

TEST_SUITE("lab") {

TEST_CASE("s-grid parsing") {
  const auto g = SGrid::parse("0.2:0.8:7");
  CHECK(g.lo == 0.2);
  CHECK(g.hi == 0.8);
  CHECK(g.count == 7);
  const auto p = g.points();
  CHECK(p.size() == 7);
  CHECK(p.back() == 0.8);
  CHECK_THROWS_AS(SGrid::parse("0:1"), ConfigError);
  CHECK_THROWS_AS(SGrid::parse("0:1:x"), ConfigError);
  CHECK_THROWS_AS(SGrid::parse("0:1:2.5"), ConfigError);
}

TEST_CASE("validation rejects bad configs") {
  RunConfig c;
  c.n = 30;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.n = 21;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.force_large = true;
  CHECK_NOTHROW(c.validate());
  c = RunConfig{};
  c.grid = SGrid{0.5, 0.2, 3};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.seed_range = std::pair<std::uint64_t, std::uint64_t>{5, 2};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.command = Command::bounds;
  c.s_star = 0.75;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.command = Command::mid_spectrum;
  c.n = 14;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(parse_command("nope"), ConfigError);
}

TEST_CASE("quartiles") {
  const auto q = quartiles({4.0, 1.0, 3.0, 2.0, 5.0});
  CHECK(q.q1 == 2.0);
  CHECK(q.median == 3.0);
  CHECK(q.q3 == 4.0);
  CHECK(quartiles({1.0, 2.0}).median == 1.5);
}

TEST_CASE("identity spectrum command") {
  RunConfig c;
  c.n = 4;
  c.perm = PermutationKind::identity;
  c.grid = SGrid{0.0, 1.0, 5};
  c.levels = 5;
  const Table t = run(c);
  CHECK(t.failures.empty());
  REQUIRE(t.rows.size() == 25);
  for (const auto& r : t.rows) {
    const double s = r[1].get<double>();
    const double g = std::sqrt(s * s + (1 - s) * (1 - s));
    const double expected = r[2].get<int>() == 0 ? 2.0 * (1 - g) : 2.0 * (1 - g) + g;
    CHECK(r[3].get<double>() == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("outputs embed the config and reproduce") {
  RunConfig c;
  c.command = Command::min_gap;
  c.n = 6;
  c.seed_range = std::pair<std::uint64_t, std::uint64_t>{3, 6};
  c.threads = 1;
  const std::string first = render(c);
  CHECK(first.find("# config: ") != std::string::npos);
  CHECK(first.find("mt19937_64") != std::string::npos);

  std::istringstream in(first);
  RunConfig again = load_config(in);
  again.threads = 2;
  CHECK(data_section(render(again)) == data_section(first));

  c.format = OutputFormat::json;
  const std::string js = render(c);
  std::istringstream jin(js);
  const RunConfig from_json = load_config(jin);
  CHECK(from_json.to_json() == c.to_json());
  const auto doc = nlohmann::json::parse(js);
  CHECK(doc["data"].size() == 4);
  CHECK(doc["data"][0].contains("s_min"));
  CHECK(doc["summary"].contains("gap_median"));
}

TEST_CASE("bounds command reports the regime error and the explicit ansatz") {
  RunConfig c;
  c.command = Command::bounds;
  c.n = 8;
  c.grid = SGrid{0.0, 1.0, 5};
  Table t = run(c);
  CHECK(t.failures.empty());
  CHECK(t.summary["ansatz"][0].contains("regime_error"));
  for (const auto& r : t.rows) CHECK(r[6].get<bool>());

  c.n = 16;
  c.s_star = 0.75;
  c.c = 0.25;
  c.k = 8;
  c.grid = SGrid{0.5, 0.5, 1};
  t = run(c);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0][9].get<double>() == 0.25);
  CHECK(t.rows[0][10].get<int>() == 8);
  CHECK(t.rows[0][8].get<bool>());
}

TEST_CASE("neighbor stats with the full set") {
  RunConfig c;
  c.command = Command::neighbor_stats;
  c.n = 6;
  c.gamma = 1.0;
  c.cluster_k = 2;
  c.trials = 5;
  const Table t = run(c);
  CHECK(t.rows[0][6].get<double>() == 1.0);
  CHECK(t.rows[0][7].get<double>() == 1.0);
}

TEST_CASE("per-run failures are collected, not fatal") {
  RunConfig c;
  c.command = Command::theorem3;
  c.n = 5;
  c.tol = 1e-10;
  c.grid = SGrid{0.9, 1.0, 3};
  c.seed_range = std::pair<std::uint64_t, std::uint64_t>{1, 3};
  const Table t = run(c);
  CHECK(t.failures.empty());
  CHECK(t.rows.size() == 9);
  CHECK(t.summary["seeds_min_gap_above_0.8"].get<int>() == 3);
}

}
