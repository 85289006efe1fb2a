#pragma once

#include <span>

// Level-1 kernels over 2^n-length arrays. Reductions split the index range
// into a fixed number of chunks and add the partial sums in chunk order, so
// results do not depend on the thread count.
namespace sglab::vec {

double dot(std::span<const double> x, std::span<const double> y);
double norm(std::span<const double> x);
/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
void scale(double a, std::span<double> x);

}  // namespace sglab::vec
