#include <lapacke.h>

#include <iomanip>
#include <ostream>
#include <string>

#include "sglab/eigensolve.hpp"
#include "sglab/errors.hpp"

namespace sglab {

namespace {

void check_dense_cap(const AdiabaticOperator& op, const SolverLimits& limits) {
  if (op.bits() > limits.dense_max_bits && !limits.force_large) {
    const double gib = static_cast<double>(op.dim()) * op.dim() * 8.0 / (1 << 30);
    throw ResourceLimitError("n=" + std::to_string(op.bits()) + " exceeds the dense cap of " +
                             std::to_string(limits.dense_max_bits) + " bits (matrix needs " +
                             std::to_string(gib) + " GiB); pass force_large to override");
  }
}

}  // namespace

std::vector<double> dense_matrix(const AdiabaticOperator& op, double s,
                                 const SolverLimits& limits) {
  check_schedule(s);
  check_dense_cap(op, limits);
  const std::size_t dim = op.dim();
  std::vector<double> h(dim * dim, 0.0);
  const double hop = 0.5 * (1.0 - s);
  for (State z = 0; z < dim; ++z) {
    h[z * dim + z] = op.diagonal(s, z);
    for (int i = 0; i < op.bits(); ++i) h[z * dim + flip(z, i)] = -hop;
  }
  return h;
}

SpectrumSlice dense_spectrum(const AdiabaticOperator& op, double s, bool want_vectors,
                             const SolverLimits& limits) {
  std::vector<double> h = dense_matrix(op, s, limits);
  const auto dim = static_cast<lapack_int>(op.dim());
  std::vector<double> w(op.dim());
  const lapack_int info = LAPACKE_dsyevd(LAPACK_ROW_MAJOR, want_vectors ? 'V' : 'N', 'U', dim,
                                         h.data(), dim, w.data());
  if (info != 0) throw Error("dense eigensolve failed, LAPACK info=" + std::to_string(info));

  SpectrumSlice slice;
  slice.s = s;
  slice.eigenvalues = std::move(w);
  slice.residual_norms.assign(op.dim(), 0.0);
  if (want_vectors) {
    // Row-major storage: eigenvector j is column j.
    slice.eigenvectors.reserve(op.dim());
    for (std::size_t j = 0; j < op.dim(); ++j) {
      Amplitudes v(op.bits());
      for (std::size_t z = 0; z < op.dim(); ++z) v[z] = h[z * op.dim() + j];
      slice.eigenvectors.push_back(std::move(v));
    }
  }
  return slice;
}

SpectrumSlice mid_spectrum(const AdiabaticOperator& op, double s, std::size_t first,
                           std::size_t count, const SolverLimits& limits) {
  if (count == 0 || first + count > op.dim()) {
    throw DomainError("index window [" + std::to_string(first) + ", " +
                      std::to_string(first + count) + ") outside the spectrum of size " +
                      std::to_string(op.dim()));
  }
  SpectrumSlice full = dense_spectrum(op, s, false, limits);
  SpectrumSlice slice;
  slice.s = s;
  slice.first_index = first;
  slice.eigenvalues.assign(full.eigenvalues.begin() + first,
                           full.eigenvalues.begin() + first + count);
  slice.residual_norms.assign(count, 0.0);
  return slice;
}

std::vector<double> linear_grid(double lo, double hi, int count) {
  if (count < 1) throw DomainError("grid needs at least one point");
  std::vector<double> grid(static_cast<std::size_t>(count));
  if (count == 1) {
    grid[0] = lo;
    return grid;
  }
  for (int i = 0; i < count; ++i) grid[i] = lo + (hi - lo) * i / (count - 1);
  grid.back() = hi;
  return grid;
}

void write_spectrum_rows(std::ostream& out, const SpectrumSlice& slice) {
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < slice.eigenvalues.size(); ++i) {
    out << slice.s << ',' << slice.first_index + i << ',' << slice.eigenvalues[i] << ','
        << (i < slice.residual_norms.size() ? slice.residual_norms[i] : 0.0) << '\n';
  }
  out.precision(old);
}

}  // namespace sglab
