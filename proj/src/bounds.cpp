#include "sglab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sglab/errors.hpp"
#include "sglab/vector_ops.hpp"

namespace sglab {

namespace {

std::vector<std::uint8_t> membership(std::span<const State> set, std::size_t dim) {
  std::vector<std::uint8_t> in(dim, 0);
  for (State z : set) in.at(z) = 1;
  return in;
}

int in_set_neighbors(const std::vector<std::uint8_t>& in, State z, int n) {
  int count = 0;
  for (int i = 0; i < n; ++i) count += in[flip(z, i)];
  return count;
}

void check_trial(const AdiabaticOperator& op, const TrialState& phi) {
  if (phi.n != op.bits()) throw DimensionError("trial state and operator use different n");
  if (!(phi.on_value > 0.0) || !std::isfinite(phi.on_value)) {
    throw DomainError("trial state value on the marked set must be positive and finite");
  }
}

// Minimum over z (skipping `skip`) of s E(z) + hop n - hop (sum of neighbor
// amplitudes)/phi_z for a piecewise trial state. Ties go to the smaller z.
CwBound piecewise_cw(const AdiabaticOperator& op, double s, const TrialState& phi,
                     std::optional<State> skip) {
  check_schedule(s);
  const int n = op.bits();
  const double hop = 0.5 * (1.0 - s);
  const std::vector<std::uint8_t> in = membership(phi.marked, op.dim());
  CwBound best{std::numeric_limits<double>::infinity(), 0};
  for (State z = 0; z < op.dim(); ++z) {
    if (skip && z == *skip) continue;
    const int marked_nbrs = in_set_neighbors(in, z, n);
    int zeroed_nbrs = 0;
    if (phi.zeroed && std::popcount(z ^ *phi.zeroed) == 1) zeroed_nbrs = 1;
    const double sum = marked_nbrs * phi.on_value + (n - marked_nbrs - zeroed_nbrs);
    const double self = in[z] ? phi.on_value : 1.0;
    const double ratio = s * op.cost(z) + hop * n - hop * sum / self;
    if (ratio < best.value) best = {ratio, z};
  }
  return best;
}

}  // namespace

double TrialState::amplitude(State z) const {
  if (zeroed && z == *zeroed) return 0.0;
  return std::binary_search(marked.begin(), marked.end(), z) ? on_value : 1.0;
}

Amplitudes TrialState::to_amplitudes() const {
  Amplitudes v(n);
  for (State z = 0; z < v.size(); ++z) v[z] = 1.0;
  for (State z : marked) v[z] = on_value;
  if (zeroed) v[*zeroed] = 0.0;
  return v;
}

double e_curve(double s) {
  check_schedule(s);
  return s <= 0.5 ? 0.5 * s : 0.5 * (1.0 - s);
}

CwBound cw_lower(const AdiabaticOperator& op, double s, const TrialState& phi) {
  check_trial(op, phi);
  if (phi.zeroed) throw DomainError("Collatz-Wielandt bound needs a strictly positive trial state");
  return piecewise_cw(op, s, phi, std::nullopt);
}

CwBound cw_lower(const AdiabaticOperator& op, double s, const Amplitudes& phi) {
  if (phi.size() != op.dim()) throw DimensionError("trial vector length mismatch");
  for (double x : phi.data()) {
    if (!(x > 0.0)) throw DomainError("Collatz-Wielandt bound needs a strictly positive trial state");
  }
  const Amplitudes h_phi = op.apply(s, phi);
  CwBound best{std::numeric_limits<double>::infinity(), 0};
  for (State z = 0; z < op.dim(); ++z) {
    const double ratio = h_phi[z] / phi[z];
    if (ratio < best.value) best = {ratio, z};
  }
  return best;
}

double variational_upper(const AdiabaticOperator& op, double s, const Amplitudes& psi) {
  return op.expectation(s, psi);
}

std::vector<State> build_low_set(const ScrambleTable& table, double c) {
  const double limit = c * table.bits();
  std::vector<State> set;
  for (State z = 0; z < table.size(); ++z) {
    if (table.cost(z) <= limit) set.push_back(z);
  }
  return set;
}

double low_set_size(int n, double c) {
  const int top = static_cast<int>(std::floor(c * n));
  double total = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= std::min(top, n); ++j) {
    total += binom;
    binom = binom * (n - j) / (j + 1);
  }
  return total;
}

AnsatzParameters ansatz_parameters(int n, double s, double c, int k) {
  if (!(s > 0.0 && s < 1.0)) {
    throw ParameterRegimeError("ansatz needs 0 < s < 1, got s=" + std::to_string(s));
  }
  if (!(c > 0.0 && c < 0.5)) throw ParameterRegimeError("ansatz needs 0 < c < 1/2");
  if (k < 2) throw ParameterRegimeError("ansatz needs k >= 2");
  const double lambda = (2.0 * s * c / (1.0 - s) - 1.0) / (k - 1);
  if (!(lambda * n > 1.0)) {
    throw ParameterRegimeError("lambda*n > 1 fails: lambda*n = " + std::to_string(lambda * n) +
                               " at n=" + std::to_string(n) + ", s=" + std::to_string(s) +
                               ", c=" + std::to_string(c) + ", k=" + std::to_string(k));
  }
  return {s, c, k, lambda};
}

AnsatzParameters lemma_parameters(int n) {
  const double x = std::pow(static_cast<double>(n), -0.25);
  const double s = 0.5 + x;
  if (!(s < 1.0)) {
    throw ParameterRegimeError("s* = 1/2 + n^(-1/4) < 1 fails: s* = " + std::to_string(s) +
                               " at n=" + std::to_string(n) + " (needs n > 16)");
  }
  const double c = 0.5 - 0.5 * x;
  const int k = static_cast<int>(std::ceil(2.0 * std::sqrt(static_cast<double>(n))));
  return ansatz_parameters(n, s, c, k);
}

Ansatz build_ansatz_A(const ScrambleTable& table, const AnsatzParameters& params) {
  TrialState state;
  state.n = table.bits();
  state.marked = build_low_set(table, params.c);
  state.on_value = params.lambda * table.bits();
  return {std::move(state), params};
}

Ansatz build_ansatz_A(const ScrambleTable& table) {
  return build_ansatz_A(table, lemma_parameters(table.bits()));
}

double ansatz_floor(int n, const AnsatzParameters& p) {
  const double hop = 0.5 * (1.0 - p.s);
  const double ln = p.lambda * n;
  const double inside = hop * (n - (p.k - 2) - (n - p.k + 2) / ln);
  const double outside = hop * (n + p.k - 1);
  return std::min(inside, outside);
}

double lemma_target(int n, double s) {
  return 0.5 * (1.0 - s) * (n - std::pow(static_cast<double>(n), 0.75));
}

double chi_mu(double s, double c) { return 2.0 * s * c / (1.0 - s) - 1.0; }

TrialState build_chi(const ScrambleTable& table, double s, double c) {
  if (!(c > 0.0 && c < 0.5)) throw DomainError("chi state needs 0 < c < 1/2");
  if (!(s > 1.0 / (1.0 + 2.0 * c) && s < 1.0)) {
    throw DomainError("chi state needs 1/(1+2c) < s < 1, got s=" + std::to_string(s));
  }
  TrialState chi;
  chi.n = table.bits();
  chi.zeroed = table.target();
  for (State z : build_low_set(table, c)) {
    if (z != table.target()) chi.marked.push_back(z);
  }
  chi.on_value = chi_mu(s, c) * table.bits();
  return chi;
}

CwBound first_excited_lower(const AdiabaticOperator& op, double s, const TrialState& chi) {
  check_trial(op, chi);
  if (!chi.zeroed) throw DomainError("first-excited bound needs a zeroed string");
  if (std::binary_search(chi.marked.begin(), chi.marked.end(), *chi.zeroed)) {
    throw DomainError("zeroed string must not be marked");
  }
  return piecewise_cw(op, s, chi, chi.zeroed);
}

double first_excited_additive_term(double s, double c) {
  return (s * s * (1.0 + 4.0 * c) - 1.0) / (2.0 * s * (1.0 + 2.0 * c) - 2.0);
}

double chi_floor_term(double s, double c) {
  return std::min(first_excited_additive_term(s, c), 0.5 * (1.0 - s));
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("binary entropy needs 0 <= x <= 1");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double solve_c(double target) {
  if (!(target > 0.0 && target < 1.0)) throw DomainError("entropy target must lie in (0, 1)");
  double lo = 0.0;
  double hi = 0.5;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    (binary_entropy(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

NeighborProfile neighbor_profile(std::span<const State> set, int n) {
  const std::size_t dim = std::size_t{1} << n;
  const std::vector<std::uint8_t> in = membership(set, dim);
  NeighborProfile profile{-1, -1};
  for (State z = 0; z < dim; ++z) {
    const int count = in_set_neighbors(in, z, n);
    int& slot = in[z] ? profile.max_inside : profile.max_outside;
    slot = std::max(slot, count);
  }
  return profile;
}

bool neighbor_cluster_exists(std::span<const State> set, int n, int k, bool center_in_set) {
  if (k < 2) throw DomainError("neighbor clusters need k >= 2");
  const NeighborProfile p = neighbor_profile(set, n);
  if (center_in_set) return p.max_inside >= k - 1;
  return std::max(p.max_inside, p.max_outside) >= k;
}

double p_bound(int n, int k, double gamma) {
  return std::pow(static_cast<double>(n), k) * std::exp2(n * (1.0 - k * (1.0 - gamma)));
}

}  // namespace sglab
