#ifndef COVL_RESULT_HPP
#define COVL_RESULT_HPP

#include <limits>
#include <optional>
#include <vector>

#include "covl/sparsity.hpp"
#include "covl/types.hpp"

namespace covl {

/// Running minima over every iterate a solver produced. Lets callers check
/// nonnegativity of powers and positivity of the noise variance after the fact.
struct IterateBounds {
  double min_gamma = std::numeric_limits<double>::infinity();
  double min_sigma2 = std::numeric_limits<double>::infinity();

  void observe(const RVector& gamma, double sigma2) {
    if (gamma.size() > 0 && gamma.minCoeff() < min_gamma) min_gamma = gamma.minCoeff();
    if (sigma2 < min_sigma2) min_sigma2 = sigma2;
  }
};

struct SolverResult {
  SupportSet support;
  RVector gamma;
  double sigma2 = 0.0;
  int iterations = 0;
  bool converged = false;
  std::optional<std::vector<double>> nll_trace;
  /// Order in which atoms entered the support (greedy methods only).
  std::vector<Index> selection_order;
  IterateBounds bounds;
};

}  // namespace covl

#endif  // COVL_RESULT_HPP
