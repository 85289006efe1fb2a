#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <tuple>

#include "doctest.h"
#include "sglab/eigensolve.hpp"
#include "sglab/errors.hpp"

using namespace sglab;

namespace {

double single_qubit_gap(double s) { return std::sqrt(s * s + (1.0 - s) * (1.0 - s)); }

// Lowest count levels of the identity-permutation operator: independent qubits.
std::vector<double> identity_levels(int n, double s, std::size_t count) {
  const double g = single_qubit_gap(s);
  std::vector<double> out;
  double binom = 1.0;
  for (int j = 0; j <= n && out.size() < count; ++j) {
    for (int m = 0; m < static_cast<int>(std::lround(binom)) && out.size() < count; ++m) {
      out.push_back(n * (1.0 - g) / 2.0 + j * g);
    }
    binom = binom * (n - j) / (j + 1);
  }
  return out;
}

}  // namespace

TEST_SUITE("eigensolve") {

TEST_CASE("dense spectrum of the identity table") {
  const AdiabaticOperator op(ScrambleTable::identity(4));
  for (double s : {0.0, 0.25, 0.5, 0.9, 1.0}) {
    const auto slice = dense_spectrum(op, s, false);
    const auto ref = identity_levels(4, s, 16);
    for (std::size_t i = 0; i < 16; ++i) CHECK(slice.eigenvalues[i] == doctest::Approx(ref[i]).epsilon(1e-12));
  }
}

TEST_CASE("dense eigenvectors satisfy H v = lambda v") {
  const AdiabaticOperator op(ScrambleTable::random(5, 3));
  const auto slice = dense_spectrum(op, 0.4, true);
  for (std::size_t i : {std::size_t{0}, std::size_t{7}, std::size_t{31}}) {
    const auto hv = op.apply(0.4, slice.eigenvectors[i]);
    for (std::size_t z = 0; z < op.dim(); ++z) {
      CHECK(hv[z] == doctest::Approx(slice.eigenvalues[i] * slice.eigenvectors[i][z]).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("Krylov lowest levels agree with dense") {
  for (int n : {6, 8}) {
    const AdiabaticOperator op(ScrambleTable::random(n, 11));
    for (double s : {0.0, 0.3, 0.5, 0.8, 1.0}) {
      const auto dense = dense_spectrum(op, s, false);
      const auto krylov = lowest_k(op, s, 12, 1e-10);
      for (std::size_t i = 0; i < 12; ++i) {
        CHECK(krylov.eigenvalues[i] == doctest::Approx(dense.eigenvalues[i]).epsilon(1e-9).scale(1.0));
        CHECK(krylov.residual_norms[i] <= 1e-10);
      }
    }
  }
}

TEST_CASE("Krylov recovers multiplicities") {
  const AdiabaticOperator op(ScrambleTable::identity(6));
  const auto slice = lowest_k(op, 0.3, 10, 1e-10);
  const auto ref = identity_levels(6, 0.3, 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK(slice.eigenvalues[i] == doctest::Approx(ref[i]).epsilon(1e-9));
}

TEST_CASE("ground state is positive and normalized") {
  const AdiabaticOperator op(ScrambleTable::random(10, 2));
  for (double s : {0.1, 0.5, 0.9}) {
    const auto gs = ground_state(op, s);
    CHECK(gs.vector.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(gs.residual < 1e-9);
    for (double x : gs.vector.data()) CHECK(x > 0.0);
    CHECK(gs.energy == doctest::Approx(dense_spectrum(op, s, false).eigenvalues[0]).epsilon(1e-11));
  }
}

TEST_CASE("identity gap closed form and minimum") {
  const AdiabaticOperator op(ScrambleTable::identity(6));
  for (double s : {0.0, 0.2, 0.5, 0.75, 1.0}) {
    CHECK(gap(op, s) == doctest::Approx(single_qubit_gap(s)).epsilon(1e-9));
  }
  const auto r = min_gap(op);
  CHECK(r.s_min == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(r.gap == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
  CHECK(r.bracket.second - r.bracket.first <= 1e-6);
}

TEST_CASE("endpoint gaps are one") {
  const AdiabaticOperator op(ScrambleTable::random(9, 21));
  CHECK(gap(op, 0.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(gap(op, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("mid spectrum window") {
  const AdiabaticOperator op(ScrambleTable::random(6, 1));
  const auto all = dense_spectrum(op, 0.5, false);
  const auto mid = mid_spectrum(op, 0.5, 20, 8);
  CHECK(mid.first_index == 20);
  REQUIRE(mid.eigenvalues.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) CHECK(mid.eigenvalues[i] == all.eigenvalues[20 + i]);
  CHECK_THROWS_AS(mid_spectrum(op, 0.5, 60, 8), DomainError);
}

TEST_CASE("size caps fail before allocating") {
  const AdiabaticOperator big(ScrambleTable::identity(14));
  CHECK_THROWS_AS(dense_spectrum(big, 0.5, false), ResourceLimitError);
  SolverLimits tight;
  tight.krylov_max_bits = 12;
  CHECK_THROWS_AS(gap(big, 0.5, 1e-10, tight), ResourceLimitError);
  CHECK_THROWS_AS(lowest_k(AdiabaticOperator(ScrambleTable::identity(3)), 0.5, 9, 1e-10), DomainError);
}

TEST_CASE("spectrum rows") {
  SpectrumSlice slice;
  slice.s = 0.5;
  slice.first_index = 3;
  slice.eigenvalues = {1.25, 2.5};
  slice.residual_norms = {0.0, 1e-12};
  std::ostringstream out;
  write_spectrum_rows(out, slice);
  CHECK(out.str() == "0.5,3,1.25,0\n0.5,4,2.5,9.9999999999999998e-13\n");
}

TEST_CASE("golden identity spectrum, n = 8") {
  std::ifstream in(SGLAB_GOLDEN_DIR "/identity_n8_spectrum.csv");
  REQUIRE(in);
  std::string line;
  std::getline(in, line);
  CHECK(line == "s,level,eigenvalue");
  const AdiabaticOperator op(ScrambleTable::identity(8));
  std::vector<std::tuple<double, int, double>> rows;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string a, b, c;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    std::getline(ss, c, ',');
    rows.emplace_back(std::stod(a), std::stoi(b), std::stod(c));
  }
  REQUIRE(rows.size() == 21 * 25);
  for (std::size_t p = 0; p < 21; ++p) {
    const double s = std::get<0>(rows[p * 25]);
    const auto dense = dense_spectrum(op, s, false);
    const auto krylov = lowest_k(op, s, 25, 1e-10);
    for (std::size_t l = 0; l < 25; ++l) {
      const double expected = std::get<2>(rows[p * 25 + l]);
      CHECK(dense.eigenvalues[l] == doctest::Approx(expected).epsilon(1e-12).scale(1.0));
      CHECK(krylov.eigenvalues[l] == doctest::Approx(expected).epsilon(1e-9).scale(1.0));
    }
  }
}

}
