#pragma once

#include <bit>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace sglab {

/// Index of a computational basis state |z>, read as an n-bit string.
using State = std::uint32_t;

/// Hard upper bound on the number of bits a table may use (32-bit entries).
inline constexpr int kMaxTableBits = 24;

/// Identifier of the pseudo-random stream used for permutations. Bump the
/// trailing version whenever the sequence of produced tables changes.
inline constexpr std::string_view kGeneratorId = "mt19937_64-fy-reject/1";
inline constexpr std::uint32_t kGeneratorVersion = 1;

inline int hamming_weight(State z) noexcept { return std::popcount(z); }

inline State flip(State z, int bit) noexcept { return z ^ (State{1} << bit); }

enum class PermutationKind : std::uint32_t { identity = 0, random = 1 };

/// A permutation of the 2^n basis strings together with its inverse.
///
/// The scrambled cost of string z is the Hamming weight of its preimage,
/// cost(z) = W(inverse(z)), so the unique zero-cost string is forward(0).
/// Tables are immutable once built and may be shared between threads.
class ScrambleTable {
 public:
  /// Uniform random permutation (Fisher–Yates with unbiased bounded draws).
  /// Deterministic in (n, seed). Throws ResourceLimitError if n > max_bits.
  static ScrambleTable random(int n, std::uint64_t seed, int max_bits = kMaxTableBits);
  static ScrambleTable identity(int n);

  int bits() const noexcept { return n_; }
  std::size_t size() const noexcept { return forward_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }
  PermutationKind kind() const noexcept { return kind_; }

  State forward(State z) const { return forward_[z]; }
  State inverse(State z) const { return inverse_[z]; }
  std::span<const State> forward_map() const noexcept { return forward_; }
  std::span<const State> inverse_map() const noexcept { return inverse_; }

  int cost(State z) const { return hamming_weight(inverse_[z]); }
  /// pi(0), the ground state of the final Hamiltonian.
  State target() const { return forward_[0]; }

  /// Binary sidecar: "SGLABPRM", u32 format version, u32 n, u64 seed,
  /// u32 generator version, u32 kind, then the forward array; all little-endian.
  void save(std::ostream& out) const;
  static ScrambleTable load(std::istream& in);

 private:
  ScrambleTable(int n, std::uint64_t seed, PermutationKind kind, std::vector<State> forward);

  int n_ = 0;
  std::uint64_t seed_ = 0;
  PermutationKind kind_ = PermutationKind::identity;
  std::vector<State> forward_;
  std::vector<State> inverse_;
};

inline ScrambleTable random_permutation(int n, std::uint64_t seed, int max_bits = kMaxTableBits) {
  return ScrambleTable::random(n, seed, max_bits);
}
inline ScrambleTable identity_permutation(int n) { return ScrambleTable::identity(n); }
inline int cost(const ScrambleTable& table, State z) { return table.cost(z); }

/// Uniform integer in [0, bound) from a 64-bit engine, by rejection (no modulo bias).
template <class Engine>
std::uint64_t bounded_draw(Engine& engine, std::uint64_t bound) {
  // 2^64 mod bound, computed without overflow.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = engine();
    if (r >= threshold) return r % bound;
  }
}

}  // namespace sglab
