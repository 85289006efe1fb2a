#include "sglab/vector_ops.hpp"

#include <array>
#include <cmath>
#include <cstdint>

namespace sglab::vec {

namespace {

constexpr std::int64_t kChunks = 64;
constexpr std::int64_t kParallelMin = std::int64_t{1} << 14;

}  // namespace

double dot(std::span<const double> x, std::span<const double> y) {
  const auto len = static_cast<std::int64_t>(x.size());
  if (len < kParallelMin) {
    double acc = 0.0;
    for (std::int64_t i = 0; i < len; ++i) acc += x[i] * y[i];
    return acc;
  }
  std::array<double, kChunks> partial{};
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < kChunks; ++c) {
    const std::int64_t lo = len * c / kChunks;
    const std::int64_t hi = len * (c + 1) / kChunks;
    double acc = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) acc += x[i] * y[i];
    partial[c] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

double norm(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  const auto len = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static) if (len >= kParallelMin)
  for (std::int64_t i = 0; i < len; ++i) y[i] += a * x[i];
}

void scale(double a, std::span<double> x) {
  const auto len = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static) if (len >= kParallelMin)
  for (std::int64_t i = 0; i < len; ++i) x[i] *= a;
}

}  // namespace sglab::vec
