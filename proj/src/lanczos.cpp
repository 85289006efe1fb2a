#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "sglab/eigensolve.hpp"
#include "sglab/errors.hpp"
#include "sglab/vector_ops.hpp"

namespace sglab {

namespace {

using Vector = std::vector<double>;
using Basis = std::vector<Vector>;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t default_start_seed(const AdiabaticOperator& op, double s) {
  std::uint64_t h = splitmix(static_cast<std::uint64_t>(op.bits()));
  h = splitmix(h ^ op.table_seed());
  h = splitmix(h ^ std::bit_cast<std::uint64_t>(s));
  return h;
}

void fill_random(std::mt19937_64& engine, Vector& v) {
  for (auto& x : v) x = static_cast<double>(engine() >> 11) * 0x1.0p-52 - 1.0;
}

// Two-pass classical Gram-Schmidt (DGKS): the second pass only runs when
// the first removed most of the vector. Returns the final norm.
double orthogonalize(Vector& w, const Basis& a, const Basis& b) {
  const double before = vec::norm(w);
  double after = before;
  for (int pass = 0; pass < 2; ++pass) {
    for (const Basis* set : {&a, &b}) {
      for (const auto& u : *set) vec::axpy(-vec::dot(u, w), u, w);
    }
    const double prev = after;
    after = vec::norm(w);
    if (after > 0.7071 * prev) break;
  }
  return after;
}

// As orthogonalize, also accumulating the coefficients on b into h.
double project_out(Vector& w, const Basis& a, const Basis& b, Eigen::VectorXd& h) {
  const double before = vec::norm(w);
  double after = before;
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& u : a) vec::axpy(-vec::dot(u, w), u, w);
    for (std::size_t i = 0; i < b.size(); ++i) {
      const double c = vec::dot(b[i], w);
      h(static_cast<Eigen::Index>(i)) += c;
      vec::axpy(-c, b[i], w);
    }
    const double prev = after;
    after = vec::norm(w);
    if (after > 0.7071 * prev) break;
  }
  return after;
}

struct Locked {
  double value;
  double residual;
  Vector vector;
};

}  // namespace

SpectrumSlice lowest_k(const AdiabaticOperator& op, double s, int k, double tol,
                       const LanczosOptions& options) {
  check_schedule(s);
  const std::size_t dim = op.dim();
  if (k < 1 || static_cast<std::size_t>(k) > dim) {
    throw DomainError("requested " + std::to_string(k) + " levels of a " + std::to_string(dim) +
                      "-dimensional operator");
  }
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (op.bits() > options.limits.krylov_max_bits && !options.limits.force_large) {
    throw ResourceLimitError("n=" + std::to_string(op.bits()) + " exceeds the Krylov cap of " +
                             std::to_string(options.limits.krylov_max_bits) +
                             " bits; pass force_large to override");
  }

  const auto kk = static_cast<std::size_t>(k);
  const std::size_t krylov_cap =
      options.max_krylov > 0 ? static_cast<std::size_t>(options.max_krylov)
                             : std::max<std::size_t>(3 * kk + 20, 30);
  const double breakdown = std::max(1e-3 * tol, 1e-13 * (op.bits() + 1));
  constexpr std::size_t kCheckEvery = 5;

  std::mt19937_64 engine(options.start_seed.value_or(default_start_seed(op, s)));
  std::vector<Locked> locked;
  Basis locked_vecs;
  std::vector<double> best_residuals;
  Vector restart;
  if (!options.start_vector.empty()) {
    if (options.start_vector.size() != dim) throw DimensionError("start vector length does not match the operator");
    restart = options.start_vector;
  }
  int runs = 0;
  int matvecs = 0;
  Vector hx(dim);

  auto kth_locked = [&]() {
    std::vector<double> vals;
    for (const auto& l : locked) vals.push_back(l.value);
    std::nth_element(vals.begin(), vals.begin() + (kk - 1), vals.end());
    return vals[kk - 1];
  };

  // Thick restart: the kept Ritz vectors and the residual direction seed the
  // next cycle. proj holds V^T H V built from the reorthogonalization
  // coefficients, so it stays exact whatever the restart structure.
  Basis basis;
  Eigen::MatrixXd proj;
  std::size_t done = 0;
  Eigen::VectorXd coeff;

  auto start_basis = [&](std::size_t m_cap) {
    Vector v(dim);
    if (!restart.empty()) {
      v = std::move(restart);
      restart.clear();
    } else {
      fill_random(engine, v);
    }
    double nv = orthogonalize(v, locked_vecs, basis);
    for (int attempt = 0; nv < 1e-8 && attempt < 8; ++attempt) {
      fill_random(engine, v);
      nv = orthogonalize(v, locked_vecs, basis);
    }
    vec::scale(1.0 / nv, v);
    basis.push_back(std::move(v));
    proj = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_cap), static_cast<Eigen::Index>(m_cap));
  };

  for (;;) {
    if (locked.size() == dim) break;
    const bool verifying = locked.size() >= kk;
    if (verifying && !options.verify_complement) break;
    if (runs > options.max_restarts) {
      throw ConvergenceError("Lanczos did not converge at s=" + std::to_string(s) + " (" +
                                 std::to_string(std::min(locked.size(), kk)) + "/" +
                                 std::to_string(k) + " pairs after " + std::to_string(runs) +
                                 " cycles)",
                             best_residuals);
    }
    ++runs;

    const std::size_t want = verifying ? 1 : kk - locked.size();
    const std::size_t m_cap = std::min(krylov_cap, dim - locked.size());
    if (basis.empty()) {
      done = 0;
      start_basis(m_cap);
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz;
    std::vector<double> estimates;
    std::size_t converged = 0;
    bool invariant = false;

    for (;;) {
      const std::size_t j = done;
      Vector w(dim);
      op.apply(s, basis[j], w);
      ++matvecs;
      coeff = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
      double b = project_out(w, locked_vecs, basis, coeff);
      for (std::size_t i = 0; i <= j; ++i) {
        const auto a = static_cast<Eigen::Index>(i);
        const auto c = static_cast<Eigen::Index>(j);
        proj(a, c) = proj(c, a) = coeff(a);
      }
      done = j + 1;
      invariant = b < breakdown;
      const bool full = done >= m_cap;

      if (full || invariant || (done >= want && done % kCheckEvery == 0)) {
        const auto m = static_cast<Eigen::Index>(done);
        ritz.compute(proj.topLeftCorner(m, m));
        const double tail = invariant ? 0.0 : b;
        estimates.assign(done, 0.0);
        converged = 0;
        for (Eigen::Index i = 0; i < m; ++i) {
          estimates[i] = tail * std::abs(ritz.eigenvectors()(m - 1, i));
        }
        while (converged < done && estimates[converged] <= tol) ++converged;
        if (full || converged >= want) {
          if (!invariant) vec::scale(1.0 / b, w);
          restart = std::move(w);
          break;
        }
      }

      if (invariant) {
        fill_random(engine, w);
        b = orthogonalize(w, locked_vecs, basis);
      }
      vec::scale(1.0 / b, w);
      basis.push_back(std::move(w));
    }

    if (best_residuals.empty() || estimates.size() >= best_residuals.size()) {
      best_residuals.assign(estimates.begin(),
                            estimates.begin() + std::min(estimates.size(), kk));
    }

    const Eigen::MatrixXd& vecs = ritz.eigenvectors();
    auto ritz_vector = [&](Eigen::Index i) {
      Vector x(dim, 0.0);
      for (std::size_t j = 0; j < done; ++j) {
        vec::axpy(vecs(static_cast<Eigen::Index>(j), i), basis[j], x);
      }
      return x;
    };

    if (verifying && converged > 0 && ritz.eigenvalues()(0) >= kth_locked() - tol) break;

    std::size_t accepted = 0;
    for (std::size_t i = 0; i < converged; ++i) {
      Vector x = ritz_vector(static_cast<Eigen::Index>(i));
      const double nx = orthogonalize(x, locked_vecs, Basis{});
      vec::scale(1.0 / nx, x);
      op.apply(s, x, hx);
      ++matvecs;
      const double theta = vec::dot(x, hx);
      vec::axpy(-theta, x, hx);
      const double r = vec::norm(hx);
      if (r > tol) break;
      locked.push_back({theta, r, x});
      locked_vecs.push_back(std::move(x));
      ++accepted;
    }
    if (locked.size() == dim || (locked.size() >= kk && !options.verify_complement)) break;

    // Keep the next Ritz vectors above the accepted ones.
    const std::size_t still = locked.size() >= kk ? 1 : kk - locked.size();
    const std::size_t room = std::min(krylov_cap, dim - locked.size());
    std::size_t keep = std::max(still + 8, room / 2);
    keep = std::min({keep, room > 2 ? room - 2 : 0, done - accepted});
    Basis kept;
    kept.reserve(keep + 1);
    for (std::size_t i = 0; i < keep; ++i) {
      Vector x = ritz_vector(static_cast<Eigen::Index>(accepted + i));
      if (accepted > 0) {
        const double nx = orthogonalize(x, locked_vecs, Basis{});
        vec::scale(1.0 / nx, x);
      }
      kept.push_back(std::move(x));
    }
    basis = std::move(kept);
    const std::size_t cap_next = std::max<std::size_t>(room, basis.size() + 1);
    proj = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cap_next), static_cast<Eigen::Index>(cap_next));
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const auto a = static_cast<Eigen::Index>(i);
      proj(a, a) = ritz.eigenvalues()(static_cast<Eigen::Index>(accepted + i));
    }
    done = basis.size();
    if (basis.empty()) continue;
    Vector v = std::move(restart);
    restart.clear();
    double nv = invariant ? 0.0 : orthogonalize(v, locked_vecs, basis);
    for (int attempt = 0; nv < 1e-8 && attempt < 8; ++attempt) {
      fill_random(engine, v);
      nv = orthogonalize(v, locked_vecs, basis);
    }
    vec::scale(1.0 / nv, v);
    basis.push_back(std::move(v));
  }

  std::vector<std::size_t> order(locked.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return locked[a].value < locked[b].value; });

  SpectrumSlice slice;
  slice.s = s;
  slice.iterations = matvecs;
  for (std::size_t i = 0; i < kk; ++i) {
    auto& l = locked[order[i]];
    slice.eigenvalues.push_back(l.value);
    slice.residual_norms.push_back(l.residual);
    if (options.want_vectors) slice.eigenvectors.emplace_back(op.bits(), std::move(l.vector));
  }
  return slice;
}

GroundState ground_state(const AdiabaticOperator& op, double s, double tol,
                         const SolverLimits& limits) {
  LanczosOptions opts;
  opts.want_vectors = true;
  opts.verify_complement = false;
  opts.limits = limits;
  SpectrumSlice slice = lowest_k(op, s, 1, tol, opts);

  GroundState gs{slice.eigenvalues[0], std::move(slice.eigenvectors[0]), slice.residual_norms[0]};
  auto psi = gs.vector.data();
  const double total = std::accumulate(psi.begin(), psi.end(), 0.0);
  if (total < 0.0) vec::scale(-1.0, psi);

  if (s > 0.0 && s < 1.0) {
    // For a stoquastic irreducible H the ground energy lies strictly below
    // every diagonal entry, so psi_z = hop * sum_i psi_{z^e_i} / (D_z - E0)
    // is a nonnegative map with the ground vector as fixed point. Starting
    // from |psi| it keeps every entry positive and fixes round-off in the
    // exponentially small components.
    const int n = op.bits();
    const double hop = 0.5 * (1.0 - s);
    Vector cur(psi.begin(), psi.end());
    for (auto& x : cur) x = std::abs(x);
    Vector next(cur.size());
    const int sweeps = 4 * n + 16;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
      const auto len = static_cast<std::int64_t>(cur.size());
#pragma omp parallel for schedule(static) if (len >= (std::int64_t{1} << 12))
      for (std::int64_t z = 0; z < len; ++z) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += cur[z ^ (std::int64_t{1} << i)];
        // Averaged with the previous iterate: the hypercube is bipartite, so
        // the bare map also has eigenvalue -1.
        next[z] = 0.5 * (cur[z] + hop * acc / (op.diagonal(s, static_cast<State>(z)) - gs.energy));
      }
      vec::scale(1.0 / vec::norm(next), next);
      std::swap(cur, next);
    }
    std::copy(cur.begin(), cur.end(), psi.begin());
    op.apply(s, gs.vector.data(), next);
    gs.energy = vec::dot(cur, next);
    vec::axpy(-gs.energy, cur, next);
    gs.residual = vec::norm(next);
  }
  return gs;
}

}  // namespace sglab
