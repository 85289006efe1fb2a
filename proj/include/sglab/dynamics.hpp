#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sglab/hamiltonian.hpp"

namespace sglab {

/// Complex amplitudes stored as separate real and imaginary arrays, so the
/// real matvec applies to each part.
struct ComplexAmplitudes {
  int n = 0;
  std::vector<double> re;
  std::vector<double> im;

  explicit ComplexAmplitudes(int bits = 0)
      : n(bits), re(std::size_t{1} << bits, 0.0), im(std::size_t{1} << bits, 0.0) {}
  static ComplexAmplitudes from_real(const Amplitudes& psi);

  std::size_t size() const noexcept { return re.size(); }
  double norm() const;
  double probability(State z) const { return re[z] * re[z] + im[z] * im[z]; }
};

enum class Integrator {
  midpoint,  // one exponential of H at the step midpoint (order 2)
  magnus4,   // two exponentials at Gauss-node combinations (order 4)
};

struct StepControl {
  Integrator scheme = Integrator::magnus4;
  /// Local error target per step, relative to ||psi||, by step doubling.
  double tolerance = 1e-9;
  /// Largest step; 0 picks 8/n so that the Krylov degree stays within max_krylov.
  double max_step = 0.0;
  /// Fixed step instead of adaptive control (used by convergence-order checks).
  std::optional<double> fixed_step;
  int max_krylov = 32;
  /// Evolve under the time-independent H(frozen_s) instead of H(t/T).
  std::optional<double> frozen_s;
  /// Starting state; |x=0> when empty.
  std::optional<ComplexAmplitudes> initial;
  bool keep_state = false;
  int dynamics_max_bits = 20;
  bool force_large = false;
};

struct EvolutionResult {
  double T = 0.0;
  double success_probability = 0.0;
  double norm_drift = 0.0;
  long steps = 0;
  long rejected = 0;
  std::optional<ComplexAmplitudes> state;
};

/// Integrates i d psi/dt = H(t/T) psi over [0, T] from |x=0> and reports the
/// final population of pi(0). Throws StepUnderflowError with the failing t.
EvolutionResult evolve(const AdiabaticOperator& op, double T, const StepControl& control = {});

/// psi <- exp(-i tau H(s)) psi by a Lanczos approximation with a posteriori
/// error control; splits tau internally when the Krylov estimate exceeds tol.
/// Returns the number of matvecs.
int krylov_exp_step(const AdiabaticOperator& op, double s, double tau, ComplexAmplitudes& psi,
                    int max_krylov = 32, double tol = 1e-13);

/// <psi|H(s)|psi> / <psi|psi>
double energy(const AdiabaticOperator& op, double s, const ComplexAmplitudes& psi);

/// Adiabatic-theorem bound on sqrt(1 - |<psi(T)|phi(1)>|^2) using
/// ||dH/ds|| <= 2n, d2H/ds2 = 0, endpoint gaps from the profile, and the
/// trapezoid rule for the integral of 7 ||dH/ds||^2 / gamma^3.
double adiabatic_bound(int n, std::span<const std::pair<double, double>> gap_profile, double T);
/// 32 n^2 / (T g^3)
double simplified_bound(int n, double g, double T);

struct TimeFloor {
  double T_min = 0.0;
  /// Whether N >= 256 / epsilon, the range where the floor is proven.
  bool applies = false;
};
/// epsilon^2 sqrt(N) / (64 h*) for N = 2^n.
TimeFloor grover_time_floor(double epsilon, int n, const ScrambleTable& table);

}  // namespace sglab
