#ifndef COVL_ULA_HPP
#define COVL_ULA_HPP

#include <cmath>
#include <numbers>
#include <vector>

#include "covl/model.hpp"

namespace covl {

inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// Half-wavelength ULA response a_n = exp(j pi n sin(theta)), n = 0..N-1, so
/// that ||a||^2 = N. Angles in degrees, both endpoints of [-90, 90] allowed.
inline CVector ula_steering(Index n, double theta_deg) {
  detail::require(n >= 1, ErrorKind::InvalidInput, "array needs at least one sensor");
  detail::require(std::isfinite(theta_deg) && theta_deg >= -90.0 && theta_deg <= 90.0, ErrorKind::Domain,
                  "angle must lie in [-90, 90] degrees");
  const double phase = std::numbers::pi * std::sin(deg2rad(theta_deg));
  CVector a(n);
  for (Index k = 0; k < n; ++k) a[k] = std::polar(1.0, phase * static_cast<double>(k));
  return a;
}

/// Equispaced angles -90, -90 + step, ..., up to and including 90 when the
/// step divides 180 (1801 points at 0.1 degrees).
inline std::vector<double> angle_grid(double step_deg) {
  detail::require(step_deg > 0.0 && step_deg <= 180.0, ErrorKind::InvalidInput, "grid step must be in (0, 180]");
  const auto count = static_cast<std::size_t>(std::floor(180.0 / step_deg + 1e-9)) + 1;
  std::vector<double> grid(count);
  // Snapped to 1e-9 degrees so that accumulated rounding cannot push the last
  // point past 90.
  for (std::size_t m = 0; m < count; ++m)
    grid[m] = std::round((-90.0 + static_cast<double>(m) * step_deg) * 1e9) / 1e9;
  return grid;
}

/// Steering-vector dictionary over the given angles.
inline Dictionary ula_dictionary(Index n, const std::vector<double>& angles_deg) {
  CMatrix a(n, static_cast<Index>(angles_deg.size()));
  for (std::size_t m = 0; m < angles_deg.size(); ++m) a.col(static_cast<Index>(m)) = ula_steering(n, angles_deg[m]);
  return Dictionary(std::move(a), AtomNorm::Array);
}

}  // namespace covl

#endif  // COVL_ULA_HPP
