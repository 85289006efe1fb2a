#include "sglab/bitperm.hpp"

#include <array>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include "sglab/errors.hpp"

namespace sglab {

namespace {

constexpr std::array<char, 8> kMagic{'S', 'G', 'L', 'A', 'B', 'P', 'R', 'M'};
constexpr std::uint32_t kFormatVersion = 1;

void check_bits(int n, int max_bits) {
  if (n < 1) throw DomainError("bit count must be at least 1, got " + std::to_string(n));
  if (n > max_bits || n > kMaxTableBits) {
    throw ResourceLimitError("n=" + std::to_string(n) + " exceeds the table cap of " +
                             std::to_string(std::min(max_bits, kMaxTableBits)) + " bits");
  }
}

template <class T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFFu);
  }
  out.write(bytes.data(), bytes.size());
}

template <class T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw FormatError("truncated permutation table");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= std::uint64_t{bytes[i]} << (8 * i);
  return static_cast<T>(v);
}

}  // namespace

ScrambleTable::ScrambleTable(int n, std::uint64_t seed, PermutationKind kind,
                             std::vector<State> forward)
    : n_(n), seed_(seed), kind_(kind), forward_(std::move(forward)), inverse_(forward_.size()) {
  for (State z = 0; z < forward_.size(); ++z) inverse_[forward_[z]] = z;
}

ScrambleTable ScrambleTable::random(int n, std::uint64_t seed, int max_bits) {
  check_bits(n, max_bits);
  std::vector<State> forward(std::size_t{1} << n);
  std::iota(forward.begin(), forward.end(), State{0});
  std::mt19937_64 engine(seed);
  for (std::size_t i = forward.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(bounded_draw(engine, i + 1));
    std::swap(forward[i], forward[j]);
  }
  return ScrambleTable(n, seed, PermutationKind::random, std::move(forward));
}

ScrambleTable ScrambleTable::identity(int n) {
  check_bits(n, kMaxTableBits);
  std::vector<State> forward(std::size_t{1} << n);
  std::iota(forward.begin(), forward.end(), State{0});
  return ScrambleTable(n, 0, PermutationKind::identity, std::move(forward));
}

void ScrambleTable::save(std::ostream& out) const {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(n_));
  put_le<std::uint64_t>(out, seed_);
  put_le<std::uint32_t>(out, kGeneratorVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(kind_));
  for (State v : forward_) put_le<std::uint32_t>(out, v);
  if (!out) throw FormatError("failed to write permutation table");
}

ScrambleTable ScrambleTable::load(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw FormatError("not a permutation table (bad magic)");
  const auto format = get_le<std::uint32_t>(in);
  if (format != kFormatVersion) {
    throw FormatError("unsupported table format version " + std::to_string(format));
  }
  const auto n = static_cast<int>(get_le<std::uint32_t>(in));
  const auto seed = get_le<std::uint64_t>(in);
  const auto generator = get_le<std::uint32_t>(in);
  const auto kind = get_le<std::uint32_t>(in);
  if (n < 1 || n > kMaxTableBits) throw FormatError("table bit count out of range");
  if (generator != kGeneratorVersion) {
    throw FormatError("table written by generator version " + std::to_string(generator));
  }
  if (kind > 1) throw FormatError("unknown permutation kind");

  std::vector<State> forward(std::size_t{1} << n);
  std::vector<char> seen(forward.size(), 0);
  for (auto& v : forward) {
    v = get_le<std::uint32_t>(in);
    if (v >= forward.size() || seen[v]) throw FormatError("table body is not a permutation");
    seen[v] = 1;
  }
  return ScrambleTable(n, seed, static_cast<PermutationKind>(kind), std::move(forward));
}

}  // namespace sglab
