#include "qkl/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qkl/specfun.hpp"

namespace qkl {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void validate_oscillator(const OscillatorParams& params) {
  if (!(params.r > 0.0) || !std::isfinite(params.r)) {
    throw std::invalid_argument("oscillator: r must be positive and finite");
  }
  if (!(params.beta >= 0.0) || !std::isfinite(params.beta)) {
    throw std::invalid_argument("oscillator: beta must be non-negative and finite");
  }
  if (params.n < 0) {
    throw std::invalid_argument("oscillator: n must be non-negative");
  }
}

void validate_box(const BoxParams& params) {
  if (!(params.a > 0.0) || !std::isfinite(params.a)) {
    throw std::invalid_argument("box: a must be positive and finite");
  }
  if (params.n < 1) {
    throw std::invalid_argument("box: n must be at least 1");
  }
  if (!(params.beta >= 0.0) || !std::isfinite(params.beta)) {
    throw std::invalid_argument("box: beta must be non-negative and finite");
  }
  if (params.a != 1.0 || params.n != 1) {
    throw std::invalid_argument(
        "box: density formulas are specialised to a = 1, n = 1");
  }
}

// Shape of the box ground-state momentum density evaluated at argument w:
//   shape(w) = 2 pi (1 + cos w) / (pi^2 - w^2)^2
//            = 4 pi cos^2(w/2) / ((pi - w)(pi + w))^2.
// The points w = +-pi are removable (value 1/(4 pi)); within |{|w| - pi}| <
// 1e-3 we switch to a local series in e = |w| - pi to avoid 0/0:
//   shape = pi (1 - e^2/12 + e^4/360) / (2 pi + e)^2 + O(e^6).
double box_shape(double w) {
  const double aw = std::abs(w);
  const double e = aw - kPi;
  if (std::abs(e) < 1e-3) {
    const double e2 = e * e;
    const double series = 1.0 - e2 / 12.0 + e2 * e2 / 360.0;
    const double den = 2.0 * kPi + e;
    return kPi * series / (den * den);
  }
  const double c = std::cos(0.5 * w);
  const double den = (kPi - w) * (kPi + w);
  return 4.0 * kPi * c * c / (den * den);
}

double log_box_shape(double w) {
  const double aw = std::abs(w);
  const double e = aw - kPi;
  if (std::abs(e) < 1e-3) {
    const double e2 = e * e;
    return std::log(kPi) + std::log1p(-e2 / 12.0 + e2 * e2 / 360.0) -
           2.0 * std::log(2.0 * kPi + e);
  }
  const double c = std::cos(0.5 * w);
  const double den = std::abs((kPi - w) * (kPi + w));
  if (c == 0.0) {
    return -std::numeric_limits<double>::infinity();
  }
  return std::log(4.0 * kPi) + 2.0 * std::log(std::abs(c)) - 2.0 * std::log(den);
}

// cos(w/2) / ((pi - w)(pi + w)) with the same removable-point guard; this is
// the amplitude factor shared by the box wavefunction.
double box_amplitude_ratio(double w) {
  const double aw = std::abs(w);
  const double e = aw - kPi;
  if (std::abs(e) < 1e-3) {
    const double e2 = e * e;
    return (0.5 - e2 / 48.0 + e2 * e2 / 3840.0) / (2.0 * kPi + e);
  }
  return std::cos(0.5 * w) / ((kPi - w) * (kPi + w));
}

// Strictly increasing map used by the box model's momentum deformation.
double box_deformed_argument(double beta, double p) {
  return p * (1.0 - 3.0 * beta * p * p);
}

// Solve box_deformed_argument(beta, p) = target for p on a monotone branch
// [lo, hi] by bisection. `increasing` selects the branch orientation.
double solve_on_branch(double beta, double target, double lo, double hi,
                       bool increasing) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) {
      break;
    }
    const double value = box_deformed_argument(beta, mid);
    const bool go_right = increasing ? (value < target) : (value > target);
    if (go_right) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Quadrature split points for the box pair on (0, P): the removable points of
// the density formulas (baseline argument pi, deformed argument pi), the
// baseline zeros (odd multiples of pi from 3 pi on, bracketed with +-1e-6
// guard points because the relative-entropy integrand has a logarithmic
// singularity there), and the deformed-density zeros (solutions of
// w(p) = m pi on both monotone branches). Mirrored to the negative axis by
// the caller.
std::vector<double> box_positive_splits(double beta, double P) {
  constexpr double kGuard = 1e-6;
  std::vector<double> splits;

  auto add = [&splits, P](double x) {
    if (x > 0.0 && x < P) {
      splits.push_back(x);
    }
  };

  // Baseline formula points: removable at pi, genuine zeros at 3 pi, 5 pi, ...
  add(kPi);
  for (int m = 3; m * kPi < P; m += 2) {
    const double z = m * kPi;
    add(z - kGuard);
    add(z);
    add(z + kGuard);
  }

  if (beta > 0.0) {
    // The deformed argument w(p) = p (1 - 3 beta p^2) rises on (0, p*) to
    // w_max = (2/3) p* with p* = 1/sqrt(9 beta), then falls; the support edge
    // P = 0.9 / sqrt(3 beta) lies beyond p*.
    const double pstar = 1.0 / std::sqrt(9.0 * beta);
    const double wmax = box_deformed_argument(beta, pstar);
    const double wP = box_deformed_argument(beta, P);
    auto add_root = [&](double root) {
      // Skip roots that collide with an existing baseline split point.
      for (double s : splits) {
        if (std::abs(root - s) < 2.0 * kGuard) {
          return;
        }
      }
      add(root);
    };
    for (int m = 1; m * kPi < wmax; m += 2) {
      const double target = m * kPi;
      add_root(solve_on_branch(beta, target, 0.0, pstar, /*increasing=*/true));
      if (target > wP) {
        add_root(solve_on_branch(beta, target, pstar, P, /*increasing=*/false));
      }
    }
  }

  std::sort(splits.begin(), splits.end());
  splits.erase(std::unique(splits.begin(), splits.end()), splits.end());
  return splits;
}

DensityPair make_oscillator_pair(double r, double beta) {
  OscillatorParams params{r, beta, 0};
  validate_oscillator(params);

  DensityPair pair;
  pair.name = "gup_oscillator";
  pair.beta = beta;
  pair.support = SupportInterval{-std::numeric_limits<double>::infinity(),
                                 std::numeric_limits<double>::infinity(),
                                 /*truncated=*/false};

  const double log_norm = 0.5 * std::log(r / kPi);
  pair.baseline_pdf = [r, log_norm](double p) {
    return std::exp(log_norm - r * p * p);
  };
  pair.log_baseline_pdf = [r, log_norm](double p) { return log_norm - r * p * p; };

  if (beta == 0.0) {
    pair.deformed_pdf = pair.baseline_pdf;
    pair.log_deformed_pdf = pair.log_baseline_pdf;
    return pair;
  }

  const OscillatorConstants c = oscillator_constants(r, beta);
  const double exponent = 1.0 + c.lambda;
  const double log_B = c.log_B;
  pair.deformed_pdf = [log_B, exponent, beta](double p) {
    return std::exp(log_B - exponent * std::log1p(beta * p * p));
  };
  pair.log_deformed_pdf = [log_B, exponent, beta](double p) {
    return log_B - exponent * std::log1p(beta * p * p);
  };
  return pair;
}

DensityPair make_box_pair(double beta) {
  BoxParams params{1.0, 1, beta};
  validate_box(params);

  DensityPair pair;
  pair.name = "nonlocal_box";
  pair.beta = beta;

  pair.baseline_pdf = [](double p) { return box_shape(p); };
  pair.log_baseline_pdf = [](double p) { return log_box_shape(p); };

  if (beta == 0.0) {
    pair.support = SupportInterval{-std::numeric_limits<double>::infinity(),
                                   std::numeric_limits<double>::infinity(),
                                   /*truncated=*/false};
    pair.deformed_pdf = pair.baseline_pdf;
    pair.log_deformed_pdf = pair.log_baseline_pdf;
    pair.recommended_splits = {-kPi, kPi};
    return pair;
  }

  const double P = 0.9 / std::sqrt(3.0 * beta);
  pair.support = SupportInterval{-P, P, /*truncated=*/true};

  pair.deformed_pdf = [beta](double p) {
    const double f = 1.0 - 3.0 * beta * p * p;
    return f * box_shape(box_deformed_argument(beta, p));
  };
  pair.log_deformed_pdf = [beta](double p) {
    const double f = 1.0 - 3.0 * beta * p * p;
    if (f <= 0.0) {
      return -std::numeric_limits<double>::infinity();
    }
    return std::log(f) + log_box_shape(box_deformed_argument(beta, p));
  };

  const std::vector<double> positive = box_positive_splits(beta, P);
  pair.recommended_splits.reserve(2 * positive.size());
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) {
    pair.recommended_splits.push_back(-*it);
  }
  pair.recommended_splits.insert(pair.recommended_splits.end(),
                                 positive.begin(), positive.end());
  return pair;
}

}  // namespace

double oscillator_lambda(const OscillatorParams& params) {
  validate_oscillator(params);
  if (params.beta == 0.0) {
    throw std::domain_error(
        "oscillator: lambda diverges as beta -> 0; use the baseline density");
  }
  const double t = params.r / params.beta;
  return 0.5 + std::sqrt(0.25 + t * t);
}

OscillatorConstants oscillator_constants(double r, double beta) {
  OscillatorParams params{r, beta, 0};
  validate_oscillator(params);
  if (beta == 0.0) {
    throw std::domain_error(
        "oscillator: normalization constants require beta > 0");
  }
  const double lambda = oscillator_lambda(params);
  // log Gamma(lambda + 1/2) - log Gamma(lambda), evaluated as a ratio so the
  // two large log-gamma values never meet in a raw subtraction.
  const double ratio = log_gamma_ratio(lambda, 0.5);
  OscillatorConstants c;
  c.lambda = lambda;
  c.log_A = 0.5 * std::log(r / beta) + ratio - std::log(lambda);
  c.log_B = std::log(lambda) + 0.5 * std::log(beta / kPi) - ratio;
  return c;
}

double oscillator_baseline_density(double r, double p) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("oscillator: r must be positive and finite");
  }
  return std::exp(0.5 * std::log(r / kPi) - r * p * p);
}

double oscillator_deformed_density(const OscillatorParams& params, double p) {
  validate_oscillator(params);
  if (params.n != 0) {
    throw std::invalid_argument(
        "oscillator: the closed-form deformed density is the ground state; "
        "use the wavefunction for excited levels");
  }
  if (params.beta == 0.0) {
    throw std::domain_error(
        "oscillator: deformed density requires beta > 0; the beta -> 0 limit "
        "is the baseline density");
  }
  const OscillatorConstants c = oscillator_constants(params.r, params.beta);
  return std::exp(c.log_B - (1.0 + c.lambda) * std::log1p(params.beta * p * p));
}

double oscillator_deformed_wavefunction(const OscillatorParams& params,
                                        double p) {
  validate_oscillator(params);
  if (params.beta == 0.0) {
    throw std::domain_error(
        "oscillator: deformed wavefunction requires beta > 0");
  }
  const double lambda = oscillator_lambda(params);
  const int n = params.n;
  const double x = params.beta * p * p;
  // s = sqrt(beta) p / sqrt(1 + beta p^2), computed via x/(1+x) so rounding
  // can never push |s| above 1.
  const double s = std::copysign(std::sqrt(x / (1.0 + x)), p);

  // Squared norm of the n-th basis function:
  //   h_n = pi 2^{1-2 lambda} Gamma(n + 2 lambda) / (n! (n + lambda)
  //         Gamma(lambda)^2),
  // folded together with the density prefactor into a single log so that no
  // intermediate Gamma overflows. The n = 0 case collapses to log_B.
  double log_pochhammer = 0.0;  // log Gamma(n + 2 lambda) - log Gamma(2 lambda)
  for (int j = 0; j < n; ++j) {
    log_pochhammer += std::log(2.0 * lambda + j);
  }
  const double log_prefactor =
      0.5 * std::log(2.0) - 0.5 * log_gamma_ratio(lambda, 0.5) +
      0.25 * std::log(kPi) +
      0.5 * (log_gamma(n + 1.0) + std::log(n + lambda) +
             0.5 * std::log(params.beta) - std::log(2.0 * kPi) -
             log_pochhammer);

  const double poly = gegenbauer(n, lambda, s);
  if (poly == 0.0) {
    return 0.0;
  }
  const double magnitude =
      std::exp(log_prefactor + std::log(std::abs(poly)) -
               0.5 * (1.0 + lambda) * std::log1p(x));
  return std::copysign(magnitude, poly);
}

double box_baseline_density(const BoxParams& params, double p) {
  validate_box(params);
  return box_shape(p);
}

double box_deformed_density(const BoxParams& params, double p) {
  validate_box(params);
  const double f = 1.0 - 3.0 * params.beta * p * p;
  return f * box_shape(box_deformed_argument(params.beta, p));
}

std::complex<double> box_deformed_wavefunction(const BoxParams& params,
                                               double p) {
  validate_box(params);
  const double f = 1.0 - 3.0 * params.beta * p * p;
  if (f < 0.0) {
    throw std::domain_error(
        "box: wavefunction is defined only where 1 - 3 beta p^2 >= 0");
  }
  const double w = box_deformed_argument(params.beta, p);
  const double amplitude = 2.0 * std::sqrt(kPi * f) * box_amplitude_ratio(w);
  return amplitude * std::complex<double>(std::cos(0.5 * w), -std::sin(0.5 * w));
}

std::vector<DeformedDensityModel> model_catalogue(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("model catalogue: r must be positive and finite");
  }
  std::vector<DeformedDensityModel> models;
  models.push_back(DeformedDensityModel{
      "gup_oscillator",
      [r](double beta) { return make_oscillator_pair(r, beta); }});
  models.push_back(DeformedDensityModel{
      "nonlocal_box", [](double beta) { return make_box_pair(beta); }});
  return models;
}

const DeformedDensityModel& lookup_model(
    const std::vector<DeformedDensityModel>& catalogue,
    const std::string& name) {
  for (const auto& model : catalogue) {
    if (model.name == name) {
      return model;
    }
  }
  std::string known;
  for (const auto& model : catalogue) {
    if (!known.empty()) {
      known += ", ";
    }
    known += model.name;
  }
  throw std::invalid_argument("unknown model '" + name +
                              "'; registered models: " + known);
}

}  // namespace qkl
