#ifndef COVL_CLBCD_HPP
#define COVL_CLBCD_HPP

// Block-coordinate descent for the covariance-learning likelihood: a
// fixed-point sweep over all signal powers followed by the closed-form noise
// variance for the current K-(peak)sparse support.

#include <algorithm>
#include <cmath>
#include <vector>

#include "covl/model.hpp"
#include "covl/result.hpp"
#include "covl/sparsity.hpp"

namespace covl {

/// Which form of the positive-part power update run_clbcd iterates.
enum class PowerRule {
  /// gamma <- r/q^2 + (gamma - 1/q)_+, the update as written in the
  /// algorithm listing. With Theta built from the current gamma this always
  /// takes the r/q^2 branch.
  Listing,
  /// Two-case form: max(gamma + r/q^2 - 1/q, 0) below 1/q, r/q^2 otherwise.
  /// All atoms move at once from the frozen Theta, which overshoots on
  /// highly coherent dictionaries such as fine DOA grids.
  CaseForm,
};

struct ClBcdConfig {
  PowerRule rule = PowerRule::Listing;
  int max_iter = 500;
  double tol = 0.5e-4;
  bool peak = false;
  /// Atoms whose power drops below this are removed for good; 0 disables.
  double prune_threshold = 0.0;
  bool record_nll = false;

  void validate() const {
    detail::require(max_iter >= 1, ErrorKind::InvalidInput, "max_iter must be >= 1");
    detail::require(tol > 0.0, ErrorKind::InvalidInput, "tol must be positive");
    detail::require(prune_threshold >= 0.0, ErrorKind::InvalidInput, "prune_threshold must be nonnegative");
  }
};

/// One fixed-point power update from the frozen inverse covariance. With
/// q = a^H Theta a and r = a^H Theta S Theta a:
///   gamma <  1/q : max(gamma + r/q^2 - 1/q, 0)
///   gamma >= 1/q : r/q^2
inline RVector fp_gamma_update(const Dictionary& a, const CovarianceState& state, const SampleCovariance& scm) {
  const AtomForms f = atom_forms(a, state, scm);
  const RVector& g = state.gamma();
  RVector out(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    const double q = f.q[i];
    if (!(q > 0.0)) throw Error(ErrorKind::Numeric, "a^H Theta a is not positive");
    const double iaa = f.r[i] / (q * q);
    out[i] = g[i] < 1.0 / q ? std::max(g[i] + iaa - 1.0 / q, 0.0) : iaa;
  }
  return out;
}

/// gamma_i <- r/q^2 + (gamma_i - 1/q)_+.
inline RVector fp_gamma_update_listing(const Dictionary& a, const CovarianceState& state,
                                       const SampleCovariance& scm) {
  const AtomForms f = atom_forms(a, state, scm);
  const RVector& g = state.gamma();
  RVector out(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    const double q = f.q[i];
    if (!(q > 0.0)) throw Error(ErrorKind::Numeric, "a^H Theta a is not positive");
    out[i] = f.r[i] / (q * q) + std::max(g[i] - 1.0 / q, 0.0);
  }
  return out;
}

/// Noise coordinate of the fixed-point map,
/// tr(Theta (S - A Gamma A^H) Theta) / tr(Theta^2). Diagnostic only: it can go
/// negative and is never used as an update.
inline double fp_g_noise(const CovarianceState& state, const SampleCovariance& scm) {
  const CMatrix& th = state.theta();
  CMatrix signal = state.sigma();
  signal.diagonal().array() -= state.sigma2();
  const double num = (th * (scm.matrix() - signal) * th).trace().real();
  const double den = (th * th).trace().real();
  return num / den;
}

/// tr((I - P) S) / (N - |M|), P the orthogonal projector onto range(A_M),
/// floored at 1e-15 tr(S)/N.
inline double noise_mle(const SampleCovariance& scm, const CMatrix& a_m, Index n) {
  detail::require(scm.dim() == n, ErrorKind::InvalidInput, "dimension mismatch");
  const Index k = a_m.cols();
  detail::require(k < n, ErrorKind::InvalidSupport, "support size must be below N");
  const double total = scm.trace();
  double kept = 0.0;
  if (k > 0) {
    detail::require(a_m.rows() == n, ErrorKind::InvalidInput, "submatrix row count mismatch");
    Eigen::ColPivHouseholderQR<CMatrix> qr(a_m);
    const auto diag = qr.matrixR().diagonal().cwiseAbs();
    if (qr.rank() < k || diag.minCoeff() <= 1e-6 * diag.maxCoeff())
      throw Error(ErrorKind::Rank, "support submatrix is rank deficient");
    const CMatrix q = qr.householderQ() * CMatrix::Identity(n, k);
    kept = (q.adjoint() * scm.matrix() * q).trace().real();
  }
  const double s2 = (total - kept) / static_cast<double>(n - k);
  return std::max(s2, 1e-15 * total / static_cast<double>(n));
}

inline CMatrix support_columns(const Dictionary& a, const SupportSet& s) { return a.columns(s.indices()); }

namespace detail {

// ||new - old||_inf / ||new||_inf, with an all-zero iterate counted as converged.
inline bool relative_change_below(const RVector& fresh, const RVector& old, double tol) {
  const double scale = fresh.cwiseAbs().maxCoeff();
  if (scale == 0.0) return true;
  return (fresh - old).cwiseAbs().maxCoeff() / scale < tol;
}

}  // namespace detail

/// CL-BCD. Starts from gamma = 0 and Theta = (N / tr S) I, i.e. the
/// noise-only model with sigma2 = tr(S)/N.
inline SolverResult run_clbcd(const SnapshotMatrix& y, const Dictionary& a, Index k, const ClBcdConfig& config) {
  config.validate();
  const Index n = a.rows();
  const Index m = a.atoms();
  detail::require(y.rows() == n, ErrorKind::InvalidInput, "snapshot rows must equal dictionary rows");
  detail::require(k >= 1 && k < n && k <= m, ErrorKind::InvalidInput, "need 1 <= K < N and K <= M");

  const SampleCovariance scm = sample_covariance(y);
  detail::require(scm.trace() > 0.0, ErrorKind::InvalidInput, "sample covariance has zero trace");

  SolverResult res;
  RVector gamma = RVector::Zero(m);
  double sigma2 = scm.trace() / static_cast<double>(n);
  CovarianceState state = build_covariance(a, gamma, sigma2);
  if (config.record_nll) res.nll_trace.emplace();

  const bool pruning = config.prune_threshold > 0.0;
  std::vector<char> pruned(static_cast<std::size_t>(m), 0);

  for (int t = 1; t <= config.max_iter; ++t) {
    RVector fresh = config.rule == PowerRule::Listing ? fp_gamma_update_listing(a, state, scm)
                                                      : fp_gamma_update(a, state, scm);
    if (pruning) {
      for (Index i = 0; i < m; ++i) {
        auto& p = pruned[static_cast<std::size_t>(i)];
        // Untouched zero-initialized atoms are only pruned after the first sweep.
        if (t > 1 && fresh[i] < config.prune_threshold) p = 1;
        if (p) fresh[i] = 0.0;
      }
    }
    res.support = hard_threshold(fresh, k, config.peak).second;
    sigma2 = noise_mle(scm, support_columns(a, res.support), n);
    res.bounds.observe(fresh, sigma2);
    res.iterations = t;

    const bool done = detail::relative_change_below(fresh, gamma, config.tol);
    gamma = std::move(fresh);
    state = build_covariance(a, gamma, sigma2);
    if (res.nll_trace) res.nll_trace->push_back(negative_llf(state, scm));
    if (done) {
      res.converged = true;
      break;
    }
  }
  res.gamma = std::move(gamma);
  res.sigma2 = sigma2;
  return res;
}

}  // namespace covl

#endif  // COVL_CLBCD_HPP
