#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qkl {

// Tolerances and domain policy for one integration call.
//   truncation_radius: nullopt means "auto" -- the full-line integrator grows
//   the domain geometrically (R, 2R, 4R, ...) starting at R = 50 until the
//   last tail slice contributes less than 0.01 * abs_tol.
//   split_points: interior abscissae where the integrand is singular or
//   non-smooth; panels never straddle them and quadrature nodes never land
//   exactly on them (the rule is open).
struct QuadratureSpec {
  double abs_tol = 1e-12;
  double rel_tol = 1e-9;
  int max_subdivisions = 2000;
  std::optional<double> truncation_radius;  // nullopt = auto
  std::vector<double> split_points;         // strictly increasing
};

struct IntegralResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::int64_t evaluations = 0;
  bool converged = false;
  std::string diagnostic;  // empty when healthy
};

using Integrand = std::function<double(double)>;

// Throws std::invalid_argument if the spec violates its invariants.
void validate(const QuadratureSpec& spec);

// Adaptive Gauss-Kronrod 7/15 integration of f over [lo, hi].
// Never throws on integrand misbehaviour: a NaN/Inf sample or an exhausted
// subdivision budget yields converged = false plus a diagnostic.
IntegralResult integrate_interval(const Integrand& f, double lo, double hi,
                                  const QuadratureSpec& spec);

// Integral of f over the whole real line. With a finite truncation_radius R
// this is just [-R, R]; in auto mode the domain is grown geometrically until
// the tail slices stop contributing (see QuadratureSpec).
IntegralResult integrate_line(const Integrand& f, const QuadratureSpec& spec);

} // namespace qkl
