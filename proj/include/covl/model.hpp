#ifndef COVL_MODEL_HPP
#define COVL_MODEL_HPP

// Gaussian covariance model Sigma = A diag(gamma) A^H + sigma2 I for the
// multiple-measurement-vector setting, its negative log-likelihood, gradient
// and the rank-one leave-one-out identities the solvers are built on.

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "covl/types.hpp"

namespace covl {

/// Column normalization convention a dictionary was built with.
enum class AtomNorm {
  None,
  Unit,   // ||a_i|| = 1, compressed-sensing dictionaries
  Array,  // ||a_i||^2 = N, steering-vector grids
};

/// N x M matrix of atoms.
class Dictionary {
 public:
  Dictionary() = default;

  explicit Dictionary(CMatrix entries, AtomNorm norm = AtomNorm::None)
      : entries_(std::move(entries)), norm_(norm) {
    detail::require(entries_.rows() >= 1 && entries_.cols() >= 1, ErrorKind::InvalidInput,
                    "dictionary must have at least one row and one column");
    detail::require(entries_.allFinite(), ErrorKind::InvalidInput, "dictionary entries must be finite");
    const double n = static_cast<double>(entries_.rows());
    for (Index i = 0; i < entries_.cols(); ++i) {
      const double sq = entries_.col(i).squaredNorm();
      if (norm_ == AtomNorm::Unit) {
        detail::require(std::abs(std::sqrt(sq) - 1.0) <= 1e-12, ErrorKind::InvalidInput,
                        "unit-norm dictionary has an atom with norm != 1");
      } else if (norm_ == AtomNorm::Array) {
        detail::require(std::abs(sq - n) <= 1e-9, ErrorKind::InvalidInput,
                        "array dictionary has an atom with squared norm != N");
      }
    }
  }

  Index rows() const noexcept { return entries_.rows(); }
  Index atoms() const noexcept { return entries_.cols(); }
  AtomNorm norm() const noexcept { return norm_; }

  const CMatrix& matrix() const noexcept { return entries_; }
  auto atom(Index i) const { return entries_.col(i); }

  /// Columns listed in `idx`, in that order.
  CMatrix columns(std::span<const Index> idx) const {
    CMatrix out(rows(), static_cast<Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
      detail::require(idx[k] >= 0 && idx[k] < atoms(), ErrorKind::InvalidInput, "atom index out of range");
      out.col(static_cast<Index>(k)) = entries_.col(idx[k]);
    }
    return out;
  }

 private:
  CMatrix entries_;
  AtomNorm norm_ = AtomNorm::None;
};

/// N x L measurements, one snapshot per column.
class SnapshotMatrix {
 public:
  SnapshotMatrix() = default;

  explicit SnapshotMatrix(CMatrix y) : y_(std::move(y)) {
    detail::require(y_.rows() >= 1 && y_.cols() >= 1, ErrorKind::InvalidInput,
                    "snapshot matrix must be non-empty");
    detail::require(y_.allFinite(), ErrorKind::InvalidInput, "snapshot entries must be finite");
  }

  Index rows() const noexcept { return y_.rows(); }
  Index snapshots() const noexcept { return y_.cols(); }
  const CMatrix& matrix() const noexcept { return y_; }

 private:
  CMatrix y_;
};

/// Hermitian positive semidefinite N x N matrix.
class SampleCovariance {
 public:
  SampleCovariance() = default;

  /// Validates Hermitian symmetry and positive semidefiniteness, then stores
  /// the symmetrized matrix.
  explicit SampleCovariance(CMatrix s) : s_(std::move(s)) {
    detail::require(s_.rows() >= 1 && s_.rows() == s_.cols(), ErrorKind::InvalidInput,
                    "sample covariance must be square and non-empty");
    detail::require(s_.allFinite(), ErrorKind::InvalidInput, "sample covariance entries must be finite");
    const double scale = s_.cwiseAbs().maxCoeff();
    detail::require((s_ - s_.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale + 1e-300,
                    ErrorKind::InvalidInput, "sample covariance is not Hermitian");
    detail::symmetrize(s_);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(s_, Eigen::EigenvaluesOnly);
    detail::require(eig.eigenvalues().minCoeff() >= -1e-10 * std::max(trace(), 1e-300),
                    ErrorKind::InvalidInput, "sample covariance is not positive semidefinite");
  }

  Index dim() const noexcept { return s_.rows(); }
  const CMatrix& matrix() const noexcept { return s_; }
  double trace() const { return s_.diagonal().real().sum(); }

 private:
  CMatrix s_;
};

/// (1/L) Y Y^H, symmetrized after the product.
inline SampleCovariance sample_covariance(const SnapshotMatrix& y) {
  const CMatrix& m = y.matrix();
  detail::require(m.size() > 0, ErrorKind::InvalidInput, "empty snapshot matrix");
  CMatrix s = (m * m.adjoint()) / static_cast<double>(m.cols());
  detail::symmetrize(s);
  return SampleCovariance(std::move(s));
}

/// Signal powers, noise variance, the model covariance they imply and its
/// inverse. Only build_covariance constructs one, so the caches always agree
/// with (gamma, sigma2).
class CovarianceState {
 public:
  const RVector& gamma() const noexcept { return gamma_; }
  double sigma2() const noexcept { return sigma2_; }
  const CMatrix& sigma() const noexcept { return sigma_; }
  const CMatrix& theta() const noexcept { return theta_; }
  double log_det() const noexcept { return log_det_; }
  Index dim() const noexcept { return sigma_.rows(); }

 private:
  friend CovarianceState build_covariance(const Dictionary&, const RVector&, double);

  RVector gamma_;
  double sigma2_ = 1.0;
  CMatrix sigma_;
  CMatrix theta_;
  double log_det_ = 0.0;
};

/// Sigma = sum_i gamma_i a_i a_i^H + sigma2 I with Theta = Sigma^{-1} from a
/// Cholesky factorization. Atoms with gamma_i = 0 are skipped.
inline CovarianceState build_covariance(const Dictionary& a, const RVector& gamma, double sigma2) {
  detail::require(gamma.size() == a.atoms(), ErrorKind::InvalidInput, "gamma length must equal atom count");
  detail::require(gamma.allFinite() && (gamma.array() >= 0.0).all(), ErrorKind::Domain,
                  "signal powers must be finite and nonnegative");
  detail::require(std::isfinite(sigma2) && sigma2 > 0.0, ErrorKind::Domain, "noise variance must be positive");

  const Index n = a.rows();
  std::vector<Index> active;
  for (Index i = 0; i < gamma.size(); ++i)
    if (gamma[i] > 0.0) active.push_back(i);

  CovarianceState st;
  st.gamma_ = gamma;
  st.sigma2_ = sigma2;
  if (active.empty()) {
    st.sigma_ = sigma2 * CMatrix::Identity(n, n);
  } else {
    CMatrix scaled(n, static_cast<Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k)
      scaled.col(static_cast<Index>(k)) = std::sqrt(gamma[active[k]]) * a.atom(active[k]);
    st.sigma_ = scaled * scaled.adjoint();
    st.sigma_.diagonal().array() += sigma2;
  }
  detail::symmetrize(st.sigma_);

  Eigen::LLT<CMatrix> llt(st.sigma_);
  detail::require(llt.info() == Eigen::Success, ErrorKind::Numeric, "model covariance is not positive definite");
  st.theta_ = llt.solve(CMatrix::Identity(n, n));
  detail::symmetrize(st.theta_);
  st.log_det_ = 2.0 * llt.matrixL().toDenseMatrix().diagonal().real().array().log().sum();
  detail::require(std::isfinite(st.log_det_) && st.theta_.allFinite(), ErrorKind::Numeric,
                  "model covariance factorization produced non-finite values");
  return st;
}

/// tr(Sigma^{-1} S) + ln|Sigma|.
inline double negative_llf(const CovarianceState& state, const SampleCovariance& scm) {
  detail::require(state.dim() == scm.dim(), ErrorKind::InvalidInput, "dimension mismatch");
  const double tr = (state.theta().cwiseProduct(scm.matrix().transpose())).sum().real();
  const double v = tr + state.log_det();
  detail::require(std::isfinite(v), ErrorKind::Numeric, "negative log-likelihood is not finite");
  return v;
}

/// Per-atom quadratic forms q_i = a_i^H Theta a_i and r_i = a_i^H Theta S Theta a_i,
/// batched as V = Theta A.
struct AtomForms {
  RVector q;
  RVector r;
};

inline AtomForms atom_forms(const Dictionary& a, const CovarianceState& state, const SampleCovariance& scm) {
  detail::require(a.rows() == state.dim() && scm.dim() == state.dim(), ErrorKind::InvalidInput,
                  "dimension mismatch");
  const CMatrix v = state.theta() * a.matrix();
  const CMatrix w = scm.matrix() * v;
  AtomForms f;
  f.q = a.matrix().cwiseProduct(v.conjugate()).colwise().sum().real().transpose();
  f.r = v.cwiseProduct(w.conjugate()).colwise().sum().real().transpose();
  return f;
}

/// Gradient of negative_llf: d/dgamma_i = -a_i^H Theta S Theta a_i + a_i^H Theta a_i,
/// d/dsigma2 = -tr(Theta (S - Sigma) Theta).
inline std::pair<RVector, double> nll_gradient(const Dictionary& a, const CovarianceState& state,
                                               const SampleCovariance& scm) {
  const AtomForms f = atom_forms(a, state, scm);
  RVector g = f.q - f.r;
  const CMatrix& th = state.theta();
  const CMatrix d = th * (scm.matrix() - state.sigma()) * th;
  return {std::move(g), -d.trace().real()};
}

/// a_i^H Sigma_{\i}^{-1} b from the full inverse, where Sigma_{\i} drops atom i.
inline Complex loo_quadratic_form(const Dictionary& a, const CovarianceState& state, Index i,
                                  const Eigen::Ref<const CVector>& b) {
  detail::require(i >= 0 && i < a.atoms(), ErrorKind::InvalidInput, "atom index out of range");
  detail::require(b.size() == state.dim(), ErrorKind::InvalidInput, "vector length mismatch");
  const CVector ta = state.theta() * a.atom(i);
  const Complex num = ta.dot(b);
  const double den = 1.0 - state.gamma()[i] * ta.dot(a.atom(i)).real();
  if (std::abs(den) < 1e-14) throw Error(ErrorKind::DegenerateDowndate, "leave-one-out denominator vanished");
  return num / den;
}

/// (B^H B)^{-1} B^H Z through a column-pivoted QR of B.
inline CMatrix pseudo_inverse_apply(const CMatrix& b, const CMatrix& z) {
  detail::require(b.rows() == z.rows(), ErrorKind::InvalidInput, "row count mismatch");
  detail::require(b.cols() >= 1 && b.cols() <= b.rows(), ErrorKind::Rank, "matrix cannot have full column rank");
  Eigen::ColPivHouseholderQR<CMatrix> qr(b);
  const auto diag = qr.matrixR().diagonal().cwiseAbs();
  // cond(B^H B) < 1e12  <=>  cond(B) < 1e6
  if (qr.rank() < b.cols() || diag.minCoeff() <= 1e-6 * diag.maxCoeff())
    throw Error(ErrorKind::Rank, "matrix is rank deficient");
  return qr.solve(z);
}

}  // namespace covl

#endif  // COVL_MODEL_HPP
