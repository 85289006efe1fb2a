#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sglab/hamiltonian.hpp"

namespace sglab {

/// Size caps shared by the dense and Krylov paths. `force_large` lifts them
/// (up to the 24-bit table limit).
struct SolverLimits {
  int dense_max_bits = 13;
  int krylov_max_bits = 20;
  bool force_large = false;
};

/// Eigenvalues of H(s) at one s, ascending, with optional eigenvectors.
/// `first_index` is the sorted position of eigenvalues[0] in the full spectrum.
struct SpectrumSlice {
  double s = 0.0;
  std::size_t first_index = 0;
  std::vector<double> eigenvalues;
  std::vector<Amplitudes> eigenvectors;
  std::vector<double> residual_norms;
  int iterations = 0;
};

struct LanczosOptions {
  /// Krylov basis size per run; 0 picks max(3k + 20, 30) clipped to the dimension.
  int max_krylov = 0;
  int max_restarts = 300;
  bool want_vectors = false;
  /// After k pairs converge, run once more in their orthogonal complement and
  /// keep going until nothing below the k-th value remains. Needed to report
  /// the multiplicity of degenerate levels.
  bool verify_complement = true;
  /// Start-vector seed; by default derived from (n, table seed, s).
  std::optional<std::uint64_t> start_seed;
  /// Starting vector for the first run; a random vector when empty.
  std::vector<double> start_vector;
  SolverLimits limits{};
};

/// Full spectrum from a dense symmetric eigensolve. Oracle path for small n.
SpectrumSlice dense_spectrum(const AdiabaticOperator& op, double s, bool want_vectors,
                             const SolverLimits& limits = {});

/// Explicit dense matrix of H(s), row-major. Only for n within the dense cap.
std::vector<double> dense_matrix(const AdiabaticOperator& op, double s,
                                 const SolverLimits& limits = {});

/// The k lowest eigenpairs by Lanczos with full reorthogonalization, locking
/// of converged pairs and thick restarts. Residuals are true ||Hv - lv||.
SpectrumSlice lowest_k(const AdiabaticOperator& op, double s, int k, double tol,
                       const LanczosOptions& options = {});

/// Contiguous slice [first, first + count) of the sorted dense spectrum.
SpectrumSlice mid_spectrum(const AdiabaticOperator& op, double s, std::size_t first,
                           std::size_t count, const SolverLimits& limits = {});

/// Ground state with the global sign chosen so the amplitudes sum positive.
/// For 0 < s < 1 the vector is polished by sweeps of a nonnegative fixed-point
/// map, so every component is strictly positive in floating point.
struct GroundState {
  double energy = 0.0;
  Amplitudes vector;
  double residual = 0.0;
};
GroundState ground_state(const AdiabaticOperator& op, double s, double tol = 1e-11,
                         const SolverLimits& limits = {});

/// lambda_1 - lambda_0. Re-solves with more levels and a tighter tolerance
/// when the two lowest values are numerically close.
double gap(const AdiabaticOperator& op, double s, double tol = 1e-10,
           const SolverLimits& limits = {});

struct MinGapOptions {
  double s_lo = 0.0;
  double s_hi = 1.0;
  double coarse_step = 0.02;
  double refine_tol = 1e-6;
  double solver_tol = 1e-10;
  SolverLimits limits{};
};

struct GapResult {
  double s_min = 0.0;
  double gap = 0.0;
  std::pair<double, double> bracket{0.0, 1.0};
  /// Every (s, gamma(s)) evaluated, sorted by s.
  std::vector<std::pair<double, double>> profile;
};

/// Coarse scan of gamma(s) followed by golden-section refinement inside the
/// triple bracketing the grid minimum. Solver failures are rethrown with the
/// offending s in the message.
GapResult min_gap(const AdiabaticOperator& op, const MinGapOptions& options = {});

/// Uniform grid of `count` points on [lo, hi] (count == 1 gives lo).
std::vector<double> linear_grid(double lo, double hi, int count);

/// CSV rows "s,level,eigenvalue,residual" (no header).
void write_spectrum_rows(std::ostream& out, const SpectrumSlice& slice);

}  // namespace sglab
