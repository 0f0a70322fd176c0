#ifndef COVL_BASELINES_HPP
#define COVL_BASELINES_HPP

// Comparison methods: IAA, SAMV2, SBL (b = 1) and SBL1 (b = 1/2) power
// recursions, cyclic coordinatewise optimization, M-SBL EM with known noise,
// simultaneous OMP, grid MUSIC and the single-source grid MLE.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "covl/clbcd.hpp"
#include "covl/model.hpp"
#include "covl/result.hpp"
#include "covl/sparsity.hpp"

namespace covl {

enum class BaselineMethod { Iaa, Samv2, Sbl, Sbl1, Cwo, Msbl };

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::Iaa;
  int max_iter = 500;
  double tol = 0.5e-4;
  /// Exponent of the ratio update; forced to 1 for SAMV2/SBL and 1/2 for SBL1
  /// by make_baseline_config.
  double b = 1.0;
  std::optional<double> known_sigma2;
  bool peak = false;

  void validate() const {
    detail::require(max_iter >= 1, ErrorKind::InvalidInput, "max_iter must be >= 1");
    detail::require(tol > 0.0, ErrorKind::InvalidInput, "tol must be positive");
    detail::require(b == 1.0 || b == 0.5, ErrorKind::InvalidInput, "ratio exponent must be 1 or 1/2");
    if (known_sigma2)
      detail::require(*known_sigma2 > 0.0, ErrorKind::InvalidInput, "known noise variance must be positive");
  }
};

inline BaselineConfig make_baseline_config(BaselineMethod m, bool peak = false) {
  BaselineConfig c;
  c.method = m;
  c.peak = peak;
  c.b = m == BaselineMethod::Sbl1 ? 0.5 : 1.0;
  return c;
}

/// gamma_i <- a_i^H Theta S Theta a_i / (a_i^H Theta a_i)^2.
inline RVector iaa_update(const Dictionary& a, const CovarianceState& state, const SampleCovariance& scm) {
  const AtomForms f = atom_forms(a, state, scm);
  return f.r.cwiseQuotient(f.q.cwiseAbs2());
}

/// gamma_i <- gamma_i [a_i^H Theta S Theta a_i / a_i^H Theta a_i]^b.
inline RVector ratio_update(const Dictionary& a, const CovarianceState& state, const SampleCovariance& scm,
                            double b) {
  const AtomForms f = atom_forms(a, state, scm);
  const RVector ratio = f.r.cwiseQuotient(f.q);
  if (b == 1.0) return state.gamma().cwiseProduct(ratio);
  return state.gamma().cwiseProduct(ratio.array().pow(b).matrix());
}

/// SAMV2 noise rule tr(Theta^2 S) / tr(Theta^2).
inline double samv2_noise_update(const CovarianceState& state, const SampleCovariance& scm) {
  const CMatrix th2 = state.theta() * state.theta();
  const double num = th2.cwiseProduct(scm.matrix().transpose()).sum().real();
  return num / th2.trace().real();
}

namespace detail {

inline double cwo_step(double g, double q, double r) {
  const double d = r / (q * q) - 1.0 / q;
  return g + std::max(d, -g);
}

}  // namespace detail

/// Exact coordinate minimizer for atom i at fixed noise: gamma_i + max(d_i, -gamma_i).
inline double cwo_update(const Dictionary& a, const CovarianceState& state, const SampleCovariance& scm, Index i) {
  detail::require(i >= 0 && i < a.atoms(), ErrorKind::InvalidInput, "atom index out of range");
  const CVector v = state.theta() * a.atom(i);
  const double q = a.atom(i).dot(v).real();
  const double r = v.dot(scm.matrix() * v).real();
  return detail::cwo_step(state.gamma()[i], q, r);
}

/// One EM step of M-SBL at the noise variance carried by `state`:
/// X = Gamma A^H Theta Y, diag(Sigma_x) = gamma - gamma^2 a^H Theta a,
/// gamma_new = diag(X X^H)/L + diag(Sigma_x).
inline RVector msbl_em_step(const Dictionary& a, const CovarianceState& state, const SnapshotMatrix& y) {
  detail::require(y.rows() == a.rows(), ErrorKind::InvalidInput, "dimension mismatch");
  const RVector& g = state.gamma();
  const CMatrix ath = a.matrix().adjoint() * state.theta();  // M x N
  const CMatrix x = g.asDiagonal() * (ath * y.matrix());
  const RVector q = ath.cwiseProduct(a.matrix().transpose()).rowwise().sum().real();
  const RVector post = g - g.cwiseAbs2().cwiseProduct(q);
  const RVector second = x.rowwise().squaredNorm() / static_cast<double>(y.snapshots());
  return (second + post).cwiseMax(0.0);
}

/// Matched-filter spectrum a_i^H S a_i / ||a_i||^4; the starting point of the
/// multiplicative recursions, which cannot leave zero.
inline RVector matched_filter_powers(const Dictionary& a, const SampleCovariance& scm) {
  const CMatrix sa = scm.matrix() * a.matrix();
  const RVector num = a.matrix().cwiseProduct(sa.conjugate()).colwise().sum().real().transpose();
  const RVector norms = a.matrix().colwise().squaredNorm().transpose();
  return num.cwiseQuotient(norms.cwiseAbs2());
}

namespace detail {

inline double support_noise(const Dictionary& a, const SampleCovariance& scm, const RVector& g, Index k, bool peak,
                            SupportSet& support) {
  support = hard_threshold(g, k, peak).second;
  return noise_mle(scm, support_columns(a, support), a.rows());
}

// Cyclic coordinate sweeps with rank-one inverse updates; noise from the
// support rule once per sweep.
inline SolverResult run_cwo(const SampleCovariance& scm, const Dictionary& a, Index k, const BaselineConfig& cfg) {
  SolverResult res;
  const Index m = a.atoms();
  RVector gamma = RVector::Zero(m);
  double sigma2 = scm.trace() / static_cast<double>(a.rows());
  CovarianceState state = build_covariance(a, gamma, sigma2);
  for (int t = 1; t <= cfg.max_iter; ++t) {
    CMatrix theta = state.theta();
    RVector fresh = gamma;
    for (Index i = 0; i < m; ++i) {
      const CVector v = theta * a.atom(i);
      const double q = a.atom(i).dot(v).real();
      const double r = v.dot(scm.matrix() * v).real();
      const double next = cwo_step(fresh[i], q, r);
      const double delta = next - fresh[i];
      fresh[i] = next;
      if (delta != 0.0) {
        theta -= (delta / (1.0 + delta * q)) * (v * v.adjoint());
      }
    }
    sigma2 = cfg.known_sigma2 ? *cfg.known_sigma2 : support_noise(a, scm, fresh, k, cfg.peak, res.support);
    res.bounds.observe(fresh, sigma2);
    res.iterations = t;
    const bool done = relative_change_below(fresh, gamma, cfg.tol);
    gamma = std::move(fresh);
    if (done) {
      res.converged = true;
      break;
    }
    state = build_covariance(a, gamma, sigma2);
  }
  res.gamma = std::move(gamma);
  res.sigma2 = sigma2;
  res.support = hard_threshold(res.gamma, k, cfg.peak).second;
  return res;
}

}  // namespace detail

/// Iterates the configured baseline under the shared relative-change stopping
/// rule and returns the H_K support of the final powers.
inline SolverResult run_baseline(const SnapshotMatrix& y, const Dictionary& a, Index k, const BaselineConfig& cfg) {
  cfg.validate();
  const Index n = a.rows();
  detail::require(y.rows() == n, ErrorKind::InvalidInput, "snapshot rows must equal dictionary rows");
  detail::require(k >= 1 && k < n && k <= a.atoms(), ErrorKind::InvalidInput, "need 1 <= K < N and K <= M");
  const SampleCovariance scm = sample_covariance(y);
  detail::require(scm.trace() > 0.0, ErrorKind::InvalidInput, "sample covariance has zero trace");

  if (cfg.method == BaselineMethod::Cwo) return detail::run_cwo(scm, a, k, cfg);
  if (cfg.method == BaselineMethod::Msbl)
    detail::require(cfg.known_sigma2.has_value(), ErrorKind::InvalidInput, "M-SBL needs a known noise variance");

  SolverResult res;
  RVector gamma = matched_filter_powers(a, scm);
  double sigma2 = cfg.known_sigma2 && cfg.method == BaselineMethod::Msbl
                      ? *cfg.known_sigma2
                      : detail::support_noise(a, scm, gamma, k, cfg.peak, res.support);
  CovarianceState state = build_covariance(a, gamma, sigma2);

  for (int t = 1; t <= cfg.max_iter; ++t) {
    RVector fresh;
    switch (cfg.method) {
      case BaselineMethod::Iaa: fresh = iaa_update(a, state, scm); break;
      case BaselineMethod::Samv2:
      case BaselineMethod::Sbl:
      case BaselineMethod::Sbl1: fresh = ratio_update(a, state, scm, cfg.b); break;
      case BaselineMethod::Msbl: fresh = msbl_em_step(a, state, y); break;
      case BaselineMethod::Cwo: break;
    }
    if (cfg.method == BaselineMethod::Samv2) {
      sigma2 = samv2_noise_update(state, scm);
    } else if (cfg.method != BaselineMethod::Msbl) {
      sigma2 = detail::support_noise(a, scm, fresh, k, cfg.peak, res.support);
    }
    res.bounds.observe(fresh, sigma2);
    res.iterations = t;
    const bool done = detail::relative_change_below(fresh, gamma, cfg.tol);
    gamma = std::move(fresh);
    if (done) {
      res.converged = true;
      break;
    }
    state = build_covariance(a, gamma, sigma2);
  }
  res.gamma = std::move(gamma);
  res.sigma2 = sigma2;
  res.support = hard_threshold(res.gamma, k, cfg.peak).second;
  return res;
}

/// Simultaneous OMP: picks argmax ||a_i^H R||_2 / ||a_i||_2 against the
/// residual, refits all rows on the support by least squares, K steps.
/// gamma carries the fitted row powers ||x_i||^2 / L on the support.
inline SolverResult somp(const SnapshotMatrix& y, const Dictionary& a, Index k) {
  const Index n = a.rows();
  const Index m = a.atoms();
  detail::require(y.rows() == n, ErrorKind::InvalidInput, "snapshot rows must equal dictionary rows");
  detail::require(k >= 1 && k <= n && k <= m, ErrorKind::InvalidInput, "need 1 <= K <= min(N, M)");

  const RVector norms = a.matrix().colwise().norm().transpose();
  SolverResult res;
  res.support = SupportSet({}, m);
  CMatrix resid = y.matrix();
  CMatrix coef;
  for (Index step = 0; step < k; ++step) {
    const RVector score = (a.matrix().adjoint() * resid).rowwise().norm().cwiseQuotient(norms);
    Index best = -1;
    double best_score = -1.0;
    for (Index i = 0; i < m; ++i) {
      if (res.support.contains(i)) continue;
      if (score[i] > best_score) {
        best_score = score[i];
        best = i;
      }
    }
    if (best < 0) throw Error(ErrorKind::InvalidState, "no candidate atom left to select");
    res.support.insert(best);
    res.selection_order.push_back(best);
    const CMatrix as = support_columns(a, res.support);
    coef = pseudo_inverse_apply(as, y.matrix());
    resid = y.matrix() - as * coef;
    res.iterations = static_cast<int>(step + 1);
  }
  res.gamma = RVector::Zero(m);
  const auto idx = res.support.indices();
  for (std::size_t j = 0; j < idx.size(); ++j)
    res.gamma[idx[j]] = coef.row(static_cast<Index>(j)).squaredNorm() / static_cast<double>(y.snapshots());
  res.sigma2 = std::max(resid.squaredNorm() / static_cast<double>(n * y.snapshots()), 1e-300);
  res.converged = true;
  res.bounds.observe(res.gamma, res.sigma2);
  return res;
}

/// 1 / ||U_n^H a_m||^2 with U_n the eigenvectors of the N - K smallest
/// eigenvalues of S.
inline RVector music_pseudospectrum(const SampleCovariance& scm, const Dictionary& grid, Index k) {
  const Index n = scm.dim();
  detail::require(grid.rows() == n, ErrorKind::InvalidInput, "dimension mismatch");
  detail::require(k >= 1 && k < n, ErrorKind::InvalidInput, "MUSIC needs 1 <= K < N");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(scm.matrix());
  const CMatrix un = eig.eigenvectors().leftCols(n - k);
  const RVector proj = (un.adjoint() * grid.matrix()).colwise().squaredNorm().transpose();
  return proj.cwiseInverse();
}

/// K largest pseudospectrum peaks.
inline SupportSet music_doas(const SampleCovariance& scm, const Dictionary& grid, Index k) {
  return hard_threshold(music_pseudospectrum(scm, grid, k), k, true).second;
}

/// argmax over the grid of a(theta)^H S a(theta). Values within a relative
/// 1e-12 of the maximum count as ties and resolve to the lowest index.
inline double mle_single_source(const SampleCovariance& scm, const Dictionary& fine_grid,
                                std::span<const double> angles_deg) {
  detail::require(fine_grid.rows() == scm.dim(), ErrorKind::InvalidInput, "dimension mismatch");
  detail::require(static_cast<Index>(angles_deg.size()) == fine_grid.atoms(), ErrorKind::InvalidInput,
                  "angle list must match grid size");
  const CMatrix sa = scm.matrix() * fine_grid.matrix();
  const RVector val = fine_grid.matrix().cwiseProduct(sa.conjugate()).colwise().sum().real().transpose();
  const double top = val.maxCoeff();
  const double cut = top - 1e-12 * std::abs(top);
  for (Index i = 0; i < val.size(); ++i)
    if (val[i] >= cut) return angles_deg[static_cast<std::size_t>(i)];
  return angles_deg.front();
}

}  // namespace covl

#endif  // COVL_BASELINES_HPP
