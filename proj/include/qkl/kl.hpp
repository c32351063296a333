#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "qkl/models.hpp"
#include "qkl/quadrature.hpp"

namespace qkl {

struct KlResult {
  double value = 0.0;            // nats
  double error_estimate = 0.0;
  double baseline_norm = 0.0;
  double deformed_norm = 0.0;
  SupportInterval support_used{0.0, 0.0, false};
  bool divergent = false;        // true when the integration failed to converge
  std::int64_t evaluations = 0;
  std::string diagnostic;        // empty when healthy
};

// Which reading of the constant-coefficient term in the first-order box
// integrand to use: the term multiplies either p^2 (momentum, the default and
// the only reading consistent with the surrounding terms) or the squared
// ground-state wavenumber (n pi / a)^2 = pi^2.
enum class BoxFirstOrderReading { momentum_squared, wavenumber_squared };

// Generic engine: D(deformed || baseline) = integral of qt ln(qt/q) over the
// pair's support, convention 0 ln 0 = 0. Both density norms are recomputed on
// every call and attached to the result as approximation diagnostics.
KlResult kl_divergence(const DensityPair& pair, const QuadratureSpec& spec);
KlResult kl_divergence(const DeformedDensityModel& model, double beta,
                       const QuadratureSpec& spec);

// Small-beta closed form 3 beta / (8 r) for the oscillator. Validity
// (beta << r) is the caller's concern; the sweep layer flags beta >= 0.1 r.
double kl_oscillator_analytic(double r, double beta);

// Oscillator KL via the log-expanded integrand
//   -qt(p) * [ln A + (1+lambda) ln(1+beta p^2) - r p^2]
// with the exact constants A and B evaluated through log-gamma ratios.
// Serves as a transcription cross-check against the generic kl_divergence.
KlResult kl_oscillator_integral_explicit(double r, double beta,
                                         const QuadratureSpec& spec);

// First-order truncations of (1 + beta p^2)^{-+ r/beta}:
//   first  = e^{-p^2 r} (1 + (beta/2) p^4 r)
//   second = e^{+p^2 r} (1 - (beta/2) p^4 r)
// Requires beta >= 0 and beta p^2 < 1 (domain error otherwise).
std::pair<double, double> oscillator_expansion_terms(double r, double beta, double p);

// Line integral of the first-order-in-beta box integrand
//   6 pi beta [sin p * p^3 (pi^2-p^2) - (1+cos p)(3 p^4 + pi^2 p^2)] / (pi^2-p^2)^3
// (default reading; the alternate reading replaces pi^2 p^2 by pi^4).
// The oscillatory 1/p tail is attached analytically via an
// integration-by-parts series, so the value converges at standard tolerances.
KlResult kl_box_first_order(double beta, const QuadratureSpec& spec,
                            BoxFirstOrderReading reading = BoxFirstOrderReading::momentum_squared);

} // namespace qkl
