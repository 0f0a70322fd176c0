#ifndef COVL_CLOMP_HPP
#define COVL_CLOMP_HPP

// Greedy covariance-learning pursuit. Each step scores every unselected atom
// by the drop in the conditional negative log-likelihood it would achieve at
// its own optimal power, adds the best one, refits (powers, noise) on the
// support in closed form and rebuilds the model covariance.

#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include "covl/clbcd.hpp"
#include "covl/model.hpp"
#include "covl/result.hpp"
#include "covl/sparsity.hpp"

namespace covl {

struct SweepResult {
  RVector gamma_candidates;
  /// Conditional NLL change per atom (<= 0); +inf for excluded atoms.
  RVector errors;
};

namespace detail {

// Optimal conditional power of atom i given q = a^H Theta a, r = a^H Theta S Theta a
// and its current power g. Sigma_{\i} quantities follow from Sherman-Morrison:
// q_{\i} = q / (1 - g q) and a^H Sigma_{\i}^{-1} S Sigma_{\i}^{-1} a = r / (1 - g q)^2,
// which collapses the ratio to r/q^2 - 1/q + g.
inline double conditional_gamma(double q, double r, double g) {
  return std::max(r / (q * q) - 1.0 / q + g, 0.0);
}

}  // namespace detail

/// Minimizer over gamma >= 0 of the conditional NLL of atom i with every other
/// parameter held fixed. For an atom with gamma_i = 0 this is
/// max(a^H Theta (S - Sigma) Theta a / (a^H Theta a)^2, 0).
inline double conditional_gamma_star(const Dictionary& a, const CovarianceState& state, const SampleCovariance& scm,
                                     Index i) {
  detail::require(i >= 0 && i < a.atoms(), ErrorKind::InvalidInput, "atom index out of range");
  const CVector v = state.theta() * a.atom(i);
  const double q = a.atom(i).dot(v).real();
  const double r = v.dot(scm.matrix() * v).real();
  return detail::conditional_gamma(q, r, state.gamma()[i]);
}

/// eps_i = ln(1 + gamma_i q_i) - gamma_i q_i over atoms outside `excluded`.
/// Assumes the swept atoms carry zero power in `state`, as they do inside CL-OMP.
inline SweepResult sweep_errors(const Dictionary& a, const CovarianceState& state, const SampleCovariance& scm,
                                const SupportSet& excluded) {
  detail::require(excluded.universe() == a.atoms() || excluded.empty(), ErrorKind::InvalidInput,
                  "excluded set does not match dictionary size");
  const AtomForms f = atom_forms(a, state, scm);
  const Index m = a.atoms();
  SweepResult s;
  s.gamma_candidates = RVector::Zero(m);
  s.errors = RVector::Constant(m, std::numeric_limits<double>::infinity());
  for (Index i = 0; i < m; ++i) {
    if (excluded.contains(i)) continue;
    const double g = detail::conditional_gamma(f.q[i], f.r[i], state.gamma()[i]);
    s.gamma_candidates[i] = g;
    const double x = g * f.q[i];
    s.errors[i] = g > 0.0 ? std::log1p(x) - x : 0.0;
  }
  return s;
}

/// Closed-form (sigma2, gamma) maximizing the likelihood restricted to the
/// columns A_M, with negative powers clipped to zero.
inline std::pair<RVector, double> provisional_mle(const SampleCovariance& scm, const CMatrix& a_m, Index n) {
  const double s2 = noise_mle(scm, a_m, n);
  RVector g(a_m.cols());
  if (a_m.cols() > 0) {
    const CMatrix pinv = pseudo_inverse_apply(a_m, CMatrix::Identity(n, n));
    CMatrix c = scm.matrix();
    c.diagonal().array() -= s2;
    const CMatrix p = pinv * c * pinv.adjoint();
    g = p.diagonal().real().cwiseMax(0.0);
  }
  return {std::move(g), s2};
}

/// CL-OMP. Runs K greedy steps, or stops early once the noise estimate falls
/// below `sigma2_floor` when one is given.
inline SolverResult run_clomp(const SnapshotMatrix& y, const Dictionary& a, Index k,
                              std::optional<double> sigma2_floor = std::nullopt) {
  const Index n = a.rows();
  const Index m = a.atoms();
  detail::require(y.rows() == n, ErrorKind::InvalidInput, "snapshot rows must equal dictionary rows");
  detail::require(k >= 1 && k < n && k <= m, ErrorKind::InvalidInput, "need 1 <= K < N and K <= M");

  const SampleCovariance scm = sample_covariance(y);
  detail::require(scm.trace() > 0.0, ErrorKind::InvalidInput, "sample covariance has zero trace");

  SolverResult res;
  res.support = SupportSet({}, m);
  RVector gamma = RVector::Zero(m);
  double sigma2 = scm.trace() / static_cast<double>(n);
  CovarianceState state = build_covariance(a, gamma, sigma2);

  for (Index step = 0; step < k; ++step) {
    const SweepResult sw = sweep_errors(a, state, scm, res.support);
    Index best = -1;
    double best_err = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < m; ++i) {
      if (sw.errors[i] < best_err) {
        best_err = sw.errors[i];
        best = i;
      }
    }
    if (best < 0) throw Error(ErrorKind::InvalidState, "no candidate atom left to select");
    res.support.insert(best);
    res.selection_order.push_back(best);

    const auto [g, s2] = provisional_mle(scm, support_columns(a, res.support), n);
    gamma.setZero();
    const auto idx = res.support.indices();
    for (std::size_t j = 0; j < idx.size(); ++j) gamma[idx[j]] = g[static_cast<Index>(j)];
    sigma2 = s2;
    state = build_covariance(a, gamma, sigma2);
    res.bounds.observe(gamma, sigma2);
    res.iterations = static_cast<int>(step + 1);
    if (sigma2_floor && sigma2 < *sigma2_floor) break;
  }
  res.converged = true;
  res.gamma = std::move(gamma);
  res.sigma2 = sigma2;
  return res;
}

}  // namespace covl

#endif  // COVL_CLOMP_HPP
