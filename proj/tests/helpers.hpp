#ifndef COVL_TESTS_HELPERS_HPP
#define COVL_TESTS_HELPERS_HPP

#include <cmath>
#include <functional>

#include "covl/model.hpp"
#include "covl/scenario.hpp"

namespace covl::testing {

inline CMatrix random_matrix(Index rows, Index cols, Rng& rng) { return complex_gaussian(rows, cols, 1.0, rng); }

inline Dictionary random_dictionary(Index n, Index m, Rng& rng) { return Dictionary(random_matrix(n, m, rng)); }

/// Wishart-style positive definite sample covariance.
inline SampleCovariance random_scm(Index n, Rng& rng, Index l = 0) {
  const CMatrix b = random_matrix(n, l > 0 ? l : 2 * n, rng);
  CMatrix s = b * b.adjoint() / static_cast<double>(b.cols());
  detail::symmetrize(s);
  return SampleCovariance(s);
}

inline RVector random_powers(Index m, Rng& rng, double zero_prob = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RVector g(m);
  for (Index i = 0; i < m; ++i) g[i] = u(rng) < zero_prob ? 0.0 : 0.1 + 2.0 * u(rng);
  return g;
}

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

inline SampleCovariance scalar_scm(double v) { return SampleCovariance(CMatrix::Constant(1, 1, v)); }

inline Dictionary scalar_dictionary() { return Dictionary(CMatrix::Constant(1, 1, 1.0)); }

/// Golden-section minimization of a unimodal f on [lo, hi].
inline double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-13) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// NLL as a function of a single atom's power, all else fixed.
inline double nll_at(const Dictionary& a, RVector gamma, double sigma2, const SampleCovariance& scm, Index i,
                     double gi) {
  gamma[i] = gi;
  return negative_llf(build_covariance(a, gamma, sigma2), scm);
}

/// NLL(gamma_i = x) - NLL(gamma_i = 0) with everything else fixed, from
/// explicit inverses in extended precision: the trace term uses
/// Sigma_x^{-1} - Sigma_0^{-1} = -x Sigma_x^{-1} a a^H Sigma_0^{-1} and the
/// log-det term an LU of I + x Sigma_0^{-1} a a^H. No cancellation against
/// the full NLL, and ill-conditioned Sigma_0 costs little accuracy.
inline double conditional_nll_delta(const Dictionary& a, RVector gamma, double sigma2, const SampleCovariance& scm,
                                    Index i, double x) {
  using LComplex = std::complex<long double>;
  using LMatrix = Eigen::Matrix<LComplex, Eigen::Dynamic, Eigen::Dynamic>;
  using LVector = Eigen::Matrix<LComplex, Eigen::Dynamic, 1>;
  gamma[i] = 0.0;
  const Index n = a.rows();
  const LMatrix s0 = build_covariance(a, gamma, sigma2).sigma().cast<LComplex>();
  const LVector ai = a.atom(i).cast<LComplex>();
  const LMatrix s = scm.matrix().cast<LComplex>();
  const long double xl = x;
  const LMatrix s0_inv = s0.inverse();
  const LMatrix sx_inv = LMatrix(s0 + xl * ai * ai.adjoint()).inverse();
  const long double trace_term = -xl * ai.dot(s0_inv * s * sx_inv * ai).real();
  const LMatrix m = LMatrix::Identity(n, n) + xl * s0_inv * ai * ai.adjoint();
  const long double logdet = std::log(std::abs(Eigen::PartialPivLU<LMatrix>(m).determinant()));
  return static_cast<double>(trace_term + logdet);
}

}  // namespace covl::testing

#endif  // COVL_TESTS_HELPERS_HPP
