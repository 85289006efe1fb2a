#include "sglab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Eigenvalues>

#include "sglab/errors.hpp"
#include "sglab/vector_ops.hpp"

namespace sglab {

namespace {

using cplx = std::complex<double>;

// Orthonormal Krylov vectors of a complex state, split into real parts.
struct KrylovBasis {
  std::vector<std::vector<double>> re;
  std::vector<std::vector<double>> im;
};

cplx inner(std::span<const double> ur, std::span<const double> ui, std::span<const double> wr,
           std::span<const double> wi) {
  return {vec::dot(ur, wr) + vec::dot(ui, wi), vec::dot(ur, wi) - vec::dot(ui, wr)};
}

// w -= <u|w> u for complex u, w.
void subtract_projection(std::span<const double> ur, std::span<const double> ui,
                         std::span<double> wr, std::span<double> wi) {
  const cplx c = inner(ur, ui, wr, wi);
  vec::axpy(-c.real(), ur, wr);
  vec::axpy(c.imag(), ui, wr);
  vec::axpy(-c.real(), ui, wi);
  vec::axpy(-c.imag(), ur, wi);
}

// exp(-i tau T) e1 for the symmetric tridiagonal T.
Eigen::VectorXcd small_propagator(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& eig,
                                  double tau) {
  const auto& q = eig.eigenvectors();
  Eigen::VectorXcd phase(q.rows());
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    phase(i) = std::exp(cplx(0.0, -tau * eig.eigenvalues()(i))) * q(0, i);
  }
  return q.cast<cplx>() * phase;
}

double schedule_at(const StepControl& control, double t, double T) {
  if (control.frozen_s) return *control.frozen_s;
  return std::clamp(t / T, 0.0, 1.0);
}

// Gauss-node weights of the two-exponential fourth-order Magnus step.
constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kNode1 = 0.5 - kSqrt3 / 6.0;
constexpr double kNode2 = 0.5 + kSqrt3 / 6.0;
constexpr double kWeightA = 0.25 + kSqrt3 / 6.0;
constexpr double kWeightB = 0.25 - kSqrt3 / 6.0;

int integrator_step(const AdiabaticOperator& op, const StepControl& control, double T, double t,
                    double h, ComplexAmplitudes& psi, double krylov_tol) {
  const int m = control.max_krylov;
  if (control.scheme == Integrator::midpoint) {
    return krylov_exp_step(op, schedule_at(control, t + 0.5 * h, T), h, psi, m, krylov_tol);
  }
  // H is affine in s, so a weighted sum of H at the two nodes is H at a
  // single effective s, scaled by the weight total 1/2.
  const double s1 = schedule_at(control, t + kNode1 * h, T);
  const double s2 = schedule_at(control, t + kNode2 * h, T);
  const double early = 2.0 * (kWeightA * s1 + kWeightB * s2);
  const double late = 2.0 * (kWeightB * s1 + kWeightA * s2);
  int mv = krylov_exp_step(op, std::clamp(early, 0.0, 1.0), 0.5 * h, psi, m, krylov_tol);
  mv += krylov_exp_step(op, std::clamp(late, 0.0, 1.0), 0.5 * h, psi, m, krylov_tol);
  return mv;
}

double distance(const ComplexAmplitudes& a, const ComplexAmplitudes& b) {
  double acc = 0.0;
  for (std::size_t z = 0; z < a.size(); ++z) {
    const double dr = a.re[z] - b.re[z];
    const double di = a.im[z] - b.im[z];
    acc += dr * dr + di * di;
  }
  return std::sqrt(acc);
}

}  // namespace

ComplexAmplitudes ComplexAmplitudes::from_real(const Amplitudes& psi) {
  ComplexAmplitudes out(psi.bits());
  std::copy(psi.data().begin(), psi.data().end(), out.re.begin());
  return out;
}

double ComplexAmplitudes::norm() const {
  return std::sqrt(vec::dot(re, re) + vec::dot(im, im));
}

int krylov_exp_step(const AdiabaticOperator& op, double s, double tau, ComplexAmplitudes& psi,
                    int max_krylov, double tol) {
  if (psi.size() != op.dim()) throw DimensionError("state length does not match the operator");
  const std::size_t dim = op.dim();
  const double breakdown = 1e-13 * (op.bits() + 1);
  int matvecs = 0;
  double remaining = tau;

  while (remaining > 0.0) {
    const double beta0 = psi.norm();
    if (beta0 == 0.0) return matvecs;

    KrylovBasis basis;
    basis.re.push_back(psi.re);
    basis.im.push_back(psi.im);
    vec::scale(1.0 / beta0, basis.re[0]);
    vec::scale(1.0 / beta0, basis.im[0]);

    std::vector<double> alpha;
    std::vector<double> beta;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    double h = remaining;
    bool exact = false;

    auto project = [&]() {
      const auto k = static_cast<Eigen::Index>(alpha.size());
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
      for (Eigen::Index i = 0; i < k; ++i) t(i, i) = alpha[i];
      for (Eigen::Index i = 0; i + 1 < k; ++i) t(i, i + 1) = t(i + 1, i) = beta[i];
      eig.compute(t);
    };
    // Standard a posteriori estimate beta_m |e_m^T exp(-i h T) e1|.
    auto error_for = [&](double step, double tail) {
      const Eigen::VectorXcd c = small_propagator(eig, step);
      return tail * std::abs(c(c.size() - 1));
    };

    double tail = 0.0;
    for (int j = 0;; ++j) {
      std::vector<double> wr(dim);
      std::vector<double> wi(dim);
      op.apply(s, basis.re[j], wr);
      op.apply(s, basis.im[j], wi);
      matvecs += 2;
      if (j > 0) {
        vec::axpy(-beta[j - 1], basis.re[j - 1], wr);
        vec::axpy(-beta[j - 1], basis.im[j - 1], wi);
      }
      const double a = inner(basis.re[j], basis.im[j], wr, wi).real();
      vec::axpy(-a, basis.re[j], wr);
      vec::axpy(-a, basis.im[j], wi);
      alpha.push_back(a);
      for (std::size_t i = 0; i < basis.re.size(); ++i) {
        subtract_projection(basis.re[i], basis.im[i], wr, wi);
      }
      tail = std::sqrt(vec::dot(wr, wr) + vec::dot(wi, wi));
      const bool last = static_cast<int>(alpha.size()) >= max_krylov ||
                        alpha.size() >= dim;
      if (tail < breakdown) {
        exact = true;
        project();
        break;
      }
      if (last || (j >= 3 && j % 2 == 1)) {
        project();
        if (last || error_for(h, tail) <= tol) break;
      }
      vec::scale(1.0 / tail, wr);
      vec::scale(1.0 / tail, wi);
      beta.push_back(tail);
      basis.re.push_back(std::move(wr));
      basis.im.push_back(std::move(wi));
    }

    if (!exact) {
      while (error_for(h, tail) > tol) {
        h *= 0.5;
        if (h < 1e-300) throw StepUnderflowError("Krylov step underflow", 0.0);
      }
    }
    const Eigen::VectorXcd c = small_propagator(eig, h);
    std::fill(psi.re.begin(), psi.re.end(), 0.0);
    std::fill(psi.im.begin(), psi.im.end(), 0.0);
    for (Eigen::Index j = 0; j < c.size(); ++j) {
      const cplx cj = beta0 * c(j);
      vec::axpy(cj.real(), basis.re[j], psi.re);
      vec::axpy(-cj.imag(), basis.im[j], psi.re);
      vec::axpy(cj.imag(), basis.re[j], psi.im);
      vec::axpy(cj.real(), basis.im[j], psi.im);
    }
    remaining -= h;
    if (remaining < 1e-15 * tau) remaining = 0.0;
  }
  return matvecs;
}

double energy(const AdiabaticOperator& op, double s, const ComplexAmplitudes& psi) {
  std::vector<double> h(op.dim());
  op.apply(s, psi.re, h);
  double e = vec::dot(psi.re, h);
  op.apply(s, psi.im, h);
  e += vec::dot(psi.im, h);
  return e / (vec::dot(psi.re, psi.re) + vec::dot(psi.im, psi.im));
}

EvolutionResult evolve(const AdiabaticOperator& op, double T, const StepControl& control) {
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("evolution time must be positive");
  if (op.bits() > control.dynamics_max_bits && !control.force_large) {
    throw ResourceLimitError("n=" + std::to_string(op.bits()) + " exceeds the dynamics cap of " +
                             std::to_string(control.dynamics_max_bits) + " bits");
  }
  if (control.frozen_s) check_schedule(*control.frozen_s);
  if (!(control.tolerance > 0.0)) throw DomainError("step tolerance must be positive");

  ComplexAmplitudes psi = control.initial ? *control.initial
                                          : ComplexAmplitudes::from_real(Amplitudes::uniform(op.bits()));
  if (psi.size() != op.dim()) throw DimensionError("initial state length does not match the operator");
  const double norm0 = psi.norm();

  const double order = control.scheme == Integrator::magnus4 ? 4.0 : 2.0;
  const double max_step =
      control.max_step > 0.0 ? control.max_step : 8.0 / std::max(1, op.bits());
  const double krylov_tol = std::max(1e-3 * control.tolerance, 1e-14);

  EvolutionResult result;
  result.T = T;
  double t = 0.0;
  double h = std::min({max_step, T, control.fixed_step.value_or(T)});

  while (T - t > 1e-14 * T) {
    h = std::min(h, T - t);
    if (control.fixed_step) {
      integrator_step(op, control, T, t, h, psi, krylov_tol);
      t += h;
      ++result.steps;
      continue;
    }
    ComplexAmplitudes full = psi;
    integrator_step(op, control, T, t, h, full, krylov_tol);
    ComplexAmplitudes half = psi;
    integrator_step(op, control, T, t, 0.5 * h, half, krylov_tol);
    integrator_step(op, control, T, t + 0.5 * h, 0.5 * h, half, krylov_tol);
    const double err = distance(full, half) / norm0;
    const double factor = err > 0.0 ? 0.9 * std::pow(control.tolerance / err, 1.0 / (order + 1.0))
                                    : 2.0;
    if (err <= control.tolerance) {
      psi = std::move(half);
      t += h;
      ++result.steps;
      h *= std::min(2.0, factor);
    } else {
      ++result.rejected;
      h *= std::max(0.2, factor);
      if (h < 1e-12 * std::max(1.0, T)) {
        throw StepUnderflowError("step size underflow at t=" + std::to_string(t), t);
      }
    }
    h = std::min(h, max_step);
  }

  result.success_probability = psi.probability(op.target()) / (norm0 * norm0);
  result.norm_drift = std::abs(psi.norm() - norm0);
  if (control.keep_state) result.state = std::move(psi);
  return result;
}

double adiabatic_bound(int n, std::span<const std::pair<double, double>> profile, double T) {
  if (!(T > 0.0)) throw DomainError("evolution time must be positive");
  if (profile.size() < 2 || profile.front().first != 0.0 || profile.back().first != 1.0) {
    throw DomainError("gap profile must be sorted and span s = 0 to s = 1");
  }
  for (const auto& [s, g] : profile) {
    if (!(g > 0.0)) throw DomainError("gap profile must be strictly positive");
  }
  const double dh = 2.0 * n;
  const double endpoints =
      dh / (profile.front().second * profile.front().second) +
      dh / (profile.back().second * profile.back().second);
  double integral = 0.0;
  for (std::size_t i = 1; i < profile.size(); ++i) {
    const auto& [s0, g0] = profile[i - 1];
    const auto& [s1, g1] = profile[i];
    if (!(s1 > s0)) throw DomainError("gap profile must be strictly increasing in s");
    const double f0 = 7.0 * dh * dh / (g0 * g0 * g0);
    const double f1 = 7.0 * dh * dh / (g1 * g1 * g1);
    integral += 0.5 * (s1 - s0) * (f0 + f1);
  }
  return (endpoints + integral) / T;
}

double simplified_bound(int n, double g, double T) {
  if (!(g > 0.0) || !(T > 0.0)) throw DomainError("gap and time must be positive");
  return 32.0 * n * n / (T * g * g * g);
}

TimeFloor grover_time_floor(double epsilon, int n, const ScrambleTable& table) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw DomainError("epsilon must lie in (0, 1]");
  if (table.bits() != n) throw DimensionError("table bit count differs from n");
  TimeFloor floor;
  floor.T_min = epsilon * epsilon * std::exp2(0.5 * n) / (64.0 * h_star(table));
  floor.applies = std::exp2(n) >= 256.0 / epsilon;
  return floor;
}

}  // namespace sglab
