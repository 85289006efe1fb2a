#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sglab/hamiltonian.hpp"

namespace sglab {

/// Piecewise-constant trial vector: 1 off the marked set, `on_value` on it,
/// and optionally exactly 0 on a single zeroed string. Unnormalized; the
/// Collatz–Wielandt ratios are scale invariant.
struct TrialState {
  int n = 0;
  std::vector<State> marked;  // sorted, unique
  double on_value = 1.0;
  std::optional<State> zeroed;

  double amplitude(State z) const;
  Amplitudes to_amplitudes() const;
};

/// Result of a Collatz–Wielandt minimization: the minimum ratio
/// <z|H|phi>/<z|phi> and the smallest string attaining it.
struct CwBound {
  double value = 0.0;
  State argmin = 0;
};

/// Lower and upper ground-energy bounds at one s, with the trial parameters
/// that produced the lower side.
struct BoundReport {
  double s = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double c = 0.0;
  int k = 0;
  double lambda_or_mu = 0.0;
  State argmin_string = 0;
};

/// Large-n ground energy per bit: s/2 below one half, (1-s)/2 above.
double e_curve(double s);

/// Collatz–Wielandt lower bound for a strictly positive piecewise trial state.
/// Only neighbor counts enter, so no per-neighbor division is done.
CwBound cw_lower(const AdiabaticOperator& op, double s, const TrialState& phi);
/// Same bound for an arbitrary entrywise-positive vector, through one matvec.
CwBound cw_lower(const AdiabaticOperator& op, double s, const Amplitudes& phi);

/// <psi|H(s)|psi> for a normalized psi.
double variational_upper(const AdiabaticOperator& op, double s, const Amplitudes& psi);

/// {z : E(z) <= n c}, sorted.
std::vector<State> build_low_set(const ScrambleTable& table, double c);
/// sum_{j <= floor(c n)} C(n, j), the size of the low set for any permutation.
double low_set_size(int n, double c);

/// Parameters of the ansatz with value lambda*n on the low set S(c).
struct AnsatzParameters {
  double s = 0.0;
  double c = 0.0;
  int k = 0;
  double lambda = 0.0;
};

/// lambda = (2 s c / (1 - s) - 1) / (k - 1) for explicit (s, c, k).
/// Throws ParameterRegimeError unless lambda * n > 1.
AnsatzParameters ansatz_parameters(int n, double s, double c, int k);
/// The asymptotic choice s = 1/2 + n^{-1/4}, c = 1/2 - n^{-1/4}/2, k = ceil(2 sqrt n).
/// Needs n > 16 (otherwise s >= 1).
AnsatzParameters lemma_parameters(int n);

struct Ansatz {
  TrialState state;
  AnsatzParameters params;
};
Ansatz build_ansatz_A(const ScrambleTable& table, const AnsatzParameters& params);
Ansatz build_ansatz_A(const ScrambleTable& table);

/// Lower bound on min_z of the ansatz ratio that holds whenever no string of
/// S(c) has k-1 neighbors in S(c) and no string outside has k neighbors in it.
double ansatz_floor(int n, const AnsatzParameters& params);
/// ((1 - s)/2)(n - n^{3/4})
double lemma_target(int n, double s);

/// mu = 2 s c / (1 - s) - 1
double chi_mu(double s, double c);
/// Trial state 1 off the low set, mu*n on it, 0 on pi(0). Needs
/// 1/(1 + 2c) < s < 1 so that mu > 0.
TrialState build_chi(const ScrambleTable& table, double s, double c);

/// Collatz–Wielandt bound on the Hamiltonian with the row and column of the
/// zeroed string removed; a lower bound on the first excited level.
CwBound first_excited_lower(const AdiabaticOperator& op, double s, const TrialState& chi);

/// (s^2 (1 + 4c) - 1) / (2 s (1 + 2c) - 2)
double first_excited_additive_term(double s, double c);
/// Lower bound on first_excited_lower(build_chi(s, c)) - ((1-s)/2) n that holds
/// whenever no two flip-neighbors lie in the low set and no string has two
/// flip-neighbors in it: min(additive term, (1 - s)/2).
double chi_floor_term(double s, double c);

/// -x log2 x - (1 - x) log2 (1 - x)
double binary_entropy(double x);
/// Root of binary_entropy(c) = target with c < 1/2, by bisection to 1e-12.
double solve_c(double target);

/// Per-string counts of flip neighbors inside a set.
struct NeighborProfile {
  int max_inside = 0;   // over strings in the set (-1 if empty)
  int max_outside = 0;  // over strings outside (-1 if the set is everything)
};
NeighborProfile neighbor_profile(std::span<const State> set, int n);

/// With center_in_set: some z in S has at least k-1 flip neighbors in S.
/// Without: some string has at least k flip neighbors in S.
bool neighbor_cluster_exists(std::span<const State> set, int n, int k, bool center_in_set);

/// n^k 2^{n [1 - k (1 - gamma)]}; raw value, may exceed one.
double p_bound(int n, int k, double gamma);

}  // namespace sglab
