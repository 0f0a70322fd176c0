#ifndef COVL_TYPES_HPP
#define COVL_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace covl {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

enum class ErrorKind {
  InvalidInput,
  Domain,
  Numeric,
  Rank,
  DegenerateDowndate,
  InvalidSupport,
  InvalidState,
  Parse,
  Validation,
  Io
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Numeric: return "numeric error";
    case ErrorKind::Rank: return "rank error";
    case ErrorKind::DegenerateDowndate: return "degenerate downdate";
    case ErrorKind::InvalidSupport: return "invalid support";
    case ErrorKind::InvalidState: return "invalid state";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::Io: return "i/o error";
  }
  return "error";
}

/// Every failure raised by the library carries a kind so callers can branch
/// without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

namespace detail {

inline void require(bool cond, ErrorKind kind, const char* msg) {
  if (!cond) throw Error(kind, msg);
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

// (Z + Z^H) / 2, in place.
inline void symmetrize(CMatrix& z) {
  z = (0.5 * (z + z.adjoint())).eval();
}

}  // namespace detail
}  // namespace covl

#endif  // COVL_TYPES_HPP
