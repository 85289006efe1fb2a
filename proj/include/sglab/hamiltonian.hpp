#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sglab/bitperm.hpp"

namespace sglab {

/// Real amplitudes over the 2^n computational basis states.
class Amplitudes {
 public:
  Amplitudes() = default;
  /// Zero vector on n bits.
  explicit Amplitudes(int n);
  Amplitudes(int n, std::vector<double> data);

  /// |x=0>, the uniform superposition (ground state of the driver).
  static Amplitudes uniform(int n);
  /// The basis state |z>.
  static Amplitudes basis(int n, State z);

  int bits() const noexcept { return n_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  double& operator[](std::size_t z) { return data_[z]; }
  double operator[](std::size_t z) const { return data_[z]; }

  double norm() const;
  void normalize();

 private:
  int n_ = 0;
  std::vector<double> data_;
};

/// Matrix-free H(s) = (1-s) sum_i (1 - sigma_x^i)/2 + s sum_z E(z)|z><z|
/// with E(z) the scrambled Hamming weight of a ScrambleTable.
///
/// Off-diagonal entries are -(1-s)/2 between strings differing in one bit, so
/// the operator is real, symmetric and stoquastic for every s in [0,1].
/// Immutable; concurrent apply() calls with distinct outputs are safe.
class AdiabaticOperator {
 public:
  explicit AdiabaticOperator(const ScrambleTable& table);

  int bits() const noexcept { return n_; }
  std::size_t dim() const noexcept { return costs_.size(); }
  std::uint64_t table_seed() const noexcept { return seed_; }
  PermutationKind kind() const noexcept { return kind_; }
  State target() const noexcept { return target_; }
  std::span<const std::uint8_t> costs() const noexcept { return costs_; }
  int cost(State z) const { return costs_[z]; }

  /// <z|H(s)|z> = (1-s) n/2 + s E(z)
  double diagonal(double s, State z) const;

  /// out = H(s) in. Throws DimensionError / DomainError.
  void apply(double s, std::span<const double> in, std::span<double> out) const;
  Amplitudes apply(double s, const Amplitudes& psi) const;

  /// <psi|H(s)|psi> for a normalized psi (2-norm within 1e-10 of one).
  double expectation(double s, const Amplitudes& psi) const;

  /// Writes "z,cost" rows for every basis string.
  void write_diagonal_csv(std::ostream& out) const;

 private:
  int n_;
  std::uint64_t seed_;
  PermutationKind kind_;
  State target_;
  std::vector<std::uint8_t> costs_;
};

/// Root-mean-square nonzero cost, sqrt(sum_z E(z)^2 / (2^n - 1)).
/// Permutation independent and never larger than n.
double h_star(const ScrambleTable& table);

void check_schedule(double s);

}  // namespace sglab
