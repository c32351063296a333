#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace qkl {

// Scale and deformation parameters of the deformed harmonic oscillator.
// r has units of inverse momentum squared; beta likewise; n is the quantum
// number (densities are provided for the ground state n = 0, excited states
// at the wavefunction level).
struct OscillatorParams {
  double r = 1.0;
  double beta = 0.0;
  int n = 0;
};

// Parameters of the non-locally deformed particle in a box. The density
// formulas are specialised to well width a = 1 and ground state n = 1,
// which is the regime the deformed transform is defined for.
struct BoxParams {
  double a = 1.0;
  int n = 1;
  double beta = 0.0;
};

struct SupportInterval {
  double lo;
  double hi;
  bool truncated;  // true when the model clips an in-principle infinite domain
};

// A baseline/deformed density pair bound to a concrete beta, ready for
// integration. Log-densities are supplied alongside the plain ones so KL
// integrands can be formed without overflow near density zeros; they are
// meaningful only where the corresponding density is positive.
struct DensityPair {
  std::string name;
  double beta = 0.0;
  std::function<double(double)> baseline_pdf;
  std::function<double(double)> deformed_pdf;
  std::function<double(double)> log_baseline_pdf;
  std::function<double(double)> log_deformed_pdf;
  SupportInterval support{0.0, 0.0, false};
  std::vector<double> recommended_splits;  // strictly increasing
};

// A named family of density pairs indexed by beta.
struct DeformedDensityModel {
  std::string name;
  std::function<DensityPair(double beta)> at;
};

// lambda = 1/2 + sqrt(1/4 + (r/beta)^2); diverges as beta -> 0, so beta = 0
// is a domain error (use the baseline directly in that regime).
double oscillator_lambda(const OscillatorParams& params);

// The oscillator's exact normalization constants in log form,
//   A = sqrt(r/beta) Gamma(lambda+1/2) / (lambda Gamma(lambda)),
//   B = lambda sqrt(beta/pi) Gamma(lambda) / Gamma(lambda+1/2),
// (A B = sqrt(r/pi) holds exactly). Requires r > 0, beta > 0.
struct OscillatorConstants {
  double lambda;
  double log_A;
  double log_B;
};
OscillatorConstants oscillator_constants(double r, double beta);

// sqrt(r/pi) * exp(-r p^2)
double oscillator_baseline_density(double r, double p);

// Ground-state deformed density B * (1 + beta p^2)^{-(1+lambda)} with the
// exactly normalizing constant B; computed in the log domain. Requires
// beta > 0 and params.n == 0.
double oscillator_deformed_density(const OscillatorParams& params, double p);

// Deformed oscillator eigenfunction in momentum space for any n >= 0
// (real-valued; Gegenbauer C_n^lambda of s = sqrt(beta) p / sqrt(1+beta p^2)).
// For n = 0 its square equals oscillator_deformed_density.
double oscillator_deformed_wavefunction(const OscillatorParams& params, double p);

// Baseline box density 2 pi (1 + cos p) / (pi^2 - p^2)^2 for a = 1, n = 1,
// with the removable singularity at |p| = pi evaluated by local series.
double box_baseline_density(const BoxParams& params, double p);

// Deformed box density (1 - 3 beta p^2) * form(p (1 - 3 beta p^2)); may be
// negative beyond the positivity radius 1/sqrt(3 beta) -- callers should
// respect the registered model support.
double box_deformed_density(const BoxParams& params, double p);

// Deformed box wavefunction sqrt(pi(1-3 beta p^2)) (1 + e^{-i w}) /
// (pi^2 - w^2) with w = p (1 - 3 beta p^2). Domain error outside the
// positivity radius (the square-root prefactor turns imaginary there).
std::complex<double> box_deformed_wavefunction(const BoxParams& params, double p);

// The registered density-pair families: "gup_oscillator" (full-line support,
// no singular points) and "nonlocal_box" (support clipped to
// |p| <= 0.9/sqrt(3 beta) for beta > 0, with split points at the baseline and
// deformed density zeros inside the support).
std::vector<DeformedDensityModel> model_catalogue(double r = 1.0);

// Throws std::invalid_argument listing the registered names when absent.
const DeformedDensityModel& lookup_model(const std::vector<DeformedDensityModel>& catalogue,
                                         const std::string& name);

} // namespace qkl
