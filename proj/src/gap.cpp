#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "sglab/eigensolve.hpp"
#include "sglab/errors.hpp"
#include "sglab/vector_ops.hpp"

namespace sglab {

namespace {

// Gap at s; when warm is non-empty it seeds the Krylov space and is replaced
// by the sum of the two lowest eigenvectors.
double gap_from(const AdiabaticOperator& op, double s, double tol, const SolverLimits& limits,
                std::vector<double>* warm) {
  if (op.dim() < 2) throw DomainError("gap needs at least two levels");
  LanczosOptions opts;
  opts.limits = limits;
  opts.verify_complement = false;
  opts.want_vectors = warm != nullptr;
  if (warm != nullptr) opts.start_vector = *warm;
  SpectrumSlice slice = lowest_k(op, s, 2, tol, opts);
  double g = slice.eigenvalues[1] - slice.eigenvalues[0];
  if (g < 10.0 * tol) {
    // Near-crossing: resolve the bottom cluster with more levels.
    const int k = static_cast<int>(std::min<std::size_t>(6, op.dim()));
    opts.verify_complement = true;
    opts.start_vector.clear();
    slice = lowest_k(op, s, k, 0.1 * tol, opts);
    g = slice.eigenvalues[1] - slice.eigenvalues[0];
  }
  if (warm != nullptr) {
    warm->assign(slice.eigenvectors[0].data().begin(), slice.eigenvectors[0].data().end());
    vec::axpy(1.0, slice.eigenvectors[1].data(), *warm);
  }
  return std::max(g, 0.0);
}

}  // namespace

double gap(const AdiabaticOperator& op, double s, double tol, const SolverLimits& limits) {
  return gap_from(op, s, tol, limits, nullptr);
}

GapResult min_gap(const AdiabaticOperator& op, const MinGapOptions& options) {
  const double lo = options.s_lo;
  const double hi = options.s_hi;
  check_schedule(lo);
  check_schedule(hi);
  if (!(hi > lo)) throw DomainError("min_gap needs s_lo < s_hi");
  if (!(options.coarse_step > 0.0) || !(options.refine_tol > 0.0)) {
    throw DomainError("coarse_step and refine_tol must be positive");
  }

  std::map<double, double> evaluated;
  std::vector<double> warm;
  auto gamma = [&](double s) {
    if (auto it = evaluated.find(s); it != evaluated.end()) return it->second;
    double g = 0.0;
    try {
      g = gap_from(op, s, options.solver_tol, options.limits, &warm);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(std::string(e.what()) + " [min_gap at s=" + std::to_string(s) + "]",
                             e.best_residuals());
    }
    evaluated.emplace(s, g);
    return g;
  };

  const int count = std::max(2, static_cast<int>(std::ceil((hi - lo) / options.coarse_step - 1e-9)) + 1);
  const std::vector<double> grid = linear_grid(lo, hi, count);
  std::size_t best = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (gamma(grid[i]) < gamma(grid[best])) best = i;
  }

  double a = grid[best == 0 ? 0 : best - 1];
  double b = grid[std::min(best + 1, grid.size() - 1)];
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = gamma(x1);
  double f2 = gamma(x2);
  while (b - a > options.refine_tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = gamma(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = gamma(x2);
    }
  }

  GapResult result;
  result.bracket = {a, b};
  result.profile.assign(evaluated.begin(), evaluated.end());
  const auto it = std::min_element(result.profile.begin(), result.profile.end(),
                                   [](const auto& p, const auto& q) { return p.second < q.second; });
  result.s_min = it->first;
  result.gap = it->second;
  return result;
}

}  // namespace sglab
