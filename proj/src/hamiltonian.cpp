#include "sglab/hamiltonian.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "sglab/errors.hpp"
#include "sglab/vector_ops.hpp"

namespace sglab {

Amplitudes::Amplitudes(int n) : n_(n), data_(std::size_t{1} << n, 0.0) {}

Amplitudes::Amplitudes(int n, std::vector<double> data) : n_(n), data_(std::move(data)) {
  if (data_.size() != (std::size_t{1} << n)) {
    throw DimensionError("amplitude vector of length " + std::to_string(data_.size()) +
                         " does not match n=" + std::to_string(n));
  }
}

Amplitudes Amplitudes::uniform(int n) {
  Amplitudes psi(n);
  const double v = 1.0 / std::sqrt(static_cast<double>(psi.size()));
  for (auto& x : psi.data_) x = v;
  return psi;
}

Amplitudes Amplitudes::basis(int n, State z) {
  Amplitudes psi(n);
  psi.data_.at(z) = 1.0;
  return psi;
}

double Amplitudes::norm() const { return vec::norm(data_); }

void Amplitudes::normalize() {
  const double nrm = norm();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw DomainError("cannot normalize a zero vector");
  vec::scale(1.0 / nrm, data_);
}

void check_schedule(double s) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw DomainError("schedule parameter s=" + std::to_string(s) + " outside [0,1]");
  }
}

AdiabaticOperator::AdiabaticOperator(const ScrambleTable& table)
    : n_(table.bits()),
      seed_(table.seed()),
      kind_(table.kind()),
      target_(table.target()),
      costs_(table.size()) {
  for (State z = 0; z < costs_.size(); ++z) costs_[z] = static_cast<std::uint8_t>(table.cost(z));
}

double AdiabaticOperator::diagonal(double s, State z) const {
  return (1.0 - s) * 0.5 * n_ + s * costs_[z];
}

void AdiabaticOperator::apply(double s, std::span<const double> in, std::span<double> out) const {
  check_schedule(s);
  if (in.size() != dim() || out.size() != dim()) {
    throw DimensionError("operator dimension " + std::to_string(dim()) + " vs vectors " +
                         std::to_string(in.size()) + "/" + std::to_string(out.size()));
  }
  const double hop = 0.5 * (1.0 - s);
  const double base = hop * n_;
  const int n = n_;
  const auto len = static_cast<std::int64_t>(dim());
  const std::uint8_t* cost = costs_.data();
  const double* x = in.data();
  double* y = out.data();
#pragma omp parallel for schedule(static) if (len >= (std::int64_t{1} << 12))
  for (std::int64_t z = 0; z < len; ++z) {
    double neighbors = 0.0;
    for (int i = 0; i < n; ++i) neighbors += x[z ^ (std::int64_t{1} << i)];
    y[z] = (base + s * cost[z]) * x[z] - hop * neighbors;
  }
}

Amplitudes AdiabaticOperator::apply(double s, const Amplitudes& psi) const {
  Amplitudes out(n_);
  apply(s, psi.data(), out.data());
  return out;
}

double AdiabaticOperator::expectation(double s, const Amplitudes& psi) const {
  const double nrm = psi.norm();
  if (std::abs(nrm - 1.0) > 1e-10) {
    throw DomainError("expectation requires a normalized state, |psi|=" + std::to_string(nrm));
  }
  const Amplitudes h_psi = apply(s, psi);
  return vec::dot(psi.data(), h_psi.data());
}

void AdiabaticOperator::write_diagonal_csv(std::ostream& out) const {
  out << "z,cost\n";
  for (State z = 0; z < costs_.size(); ++z) out << z << ',' << int{costs_[z]} << '\n';
}

double h_star(const ScrambleTable& table) {
  // Permutation independent: sum over preimages equals the sum of W(z)^2.
  double sum = 0.0;
  for (State z = 0; z < table.size(); ++z) {
    const double w = table.cost(z);
    sum += w * w;
  }
  return std::sqrt(sum / static_cast<double>(table.size() - 1));
}

}  // namespace sglab
