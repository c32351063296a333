#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "qkl/models.hpp"

namespace {

constexpr double kPi = std::numbers::pi;

bool close_rel(double x, double golden, double rel) {
  return std::abs(x - golden) <= rel * std::abs(golden);
}

bool contains_value(const std::vector<double>& xs, double v, double tol) {
  return std::any_of(xs.begin(), xs.end(),
                     [&](double x) { return std::abs(x - v) <= tol; });
}

}  // namespace

TEST_CASE("oscillator lambda reference value and small-beta scaling") {
  // lambda = 1/2 + sqrt(1/4 + (r/beta)^2); 50-digit reference at r=1,
  // beta=1e-4 (note the exact value carries the +1/2 shift, then the sqrt
  // correction of ~1.25e-9 is below double resolution at this magnitude).
  CHECK(close_rel(qkl::oscillator_lambda({1.0, 1e-4, 0}), 10000.5000125, 1e-12));
  // beta * lambda -> r as beta -> 0.
  CHECK(close_rel(1e-6 * qkl::oscillator_lambda({2.0, 1e-6, 0}), 2.0, 1e-6));
  CHECK_THROWS_AS(qkl::oscillator_lambda({1.0, 0.0, 0}), std::domain_error);
}

TEST_CASE("oscillator normalization constants multiply to sqrt(r/pi)") {
  for (double r : {0.5, 1.0, 4.0}) {
    for (double beta : {1e-8, 1e-3, 1.0, 10.0}) {
      CAPTURE(r);
      CAPTURE(beta);
      const auto c = qkl::oscillator_constants(r, beta);
      CHECK(std::abs(c.log_A + c.log_B - 0.5 * std::log(r / kPi)) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(qkl::oscillator_constants(1.0, 0.0), std::domain_error);
}

TEST_CASE("oscillator baseline density is the normalized gaussian") {
  const double r = 1.7;
  CHECK(close_rel(qkl::oscillator_baseline_density(r, 0.0), std::sqrt(r / kPi), 1e-14));
  CHECK(close_rel(qkl::oscillator_baseline_density(r, 0.9),
                  std::sqrt(r / kPi) * std::exp(-r * 0.81), 1e-13));
}

TEST_CASE("oscillator deformed ground density matches the reference value") {
  // 50-digit reference at r=1, beta=0.05, p=0.7.
  CHECK(close_rel(qkl::oscillator_deformed_density({1.0, 0.05, 0}, 0.7),
                  0.34152882105648283039, 1e-13));
  CHECK_THROWS_AS(qkl::oscillator_deformed_density({1.0, 0.0, 0}, 0.5),
                  std::domain_error);
  CHECK_THROWS_AS(qkl::oscillator_deformed_density({1.0, 0.1, 1}, 0.5),
                  std::invalid_argument);
}

TEST_CASE("oscillator deformed wavefunctions match reference values") {
  struct Row {
    double beta;
    int n;
    double p;
    double value;
  };
  // 50-digit references, r = 1 throughout.
  const Row rows[] = {
      {0.05, 0, 0.7, 0.58440467234313145111},
      {0.1, 2, 0.3, -0.43520814217074182358},
      {0.1, 2, 1.7, 0.55670591252946600764},
      {0.5, 3, 0.4, -0.66311386231579166418},
      {0.001, 1, 0.9, 0.63770426862244396637},
  };
  for (const auto& row : rows) {
    CAPTURE(row.n);
    CAPTURE(row.p);
    CHECK(close_rel(qkl::oscillator_deformed_wavefunction({1.0, row.beta, row.n}, row.p),
                    row.value, 1e-12));
  }
}

TEST_CASE("ground-state wavefunction squares to the deformed density") {
  const qkl::OscillatorParams params{1.0, 0.05, 0};
  const double psi = qkl::oscillator_deformed_wavefunction(params, 0.7);
  CHECK(close_rel(psi * psi, qkl::oscillator_deformed_density(params, 0.7), 1e-13));
}

TEST_CASE("deformed wavefunctions have definite parity") {
  for (int n = 0; n <= 3; ++n) {
    CAPTURE(n);
    const qkl::OscillatorParams params{1.0, 0.2, n};
    const double plus = qkl::oscillator_deformed_wavefunction(params, 0.6);
    const double minus = qkl::oscillator_deformed_wavefunction(params, -0.6);
    CHECK(minus == (n % 2 == 0 ? plus : -plus));
  }
}

TEST_CASE("box baseline density values") {
  const qkl::BoxParams box{1.0, 1, 0.0};
  // At p = 0 the density is 4/pi^3; at the spectral point |p| = pi the
  // removable singularity evaluates to 1/(4 pi).
  CHECK(close_rel(qkl::box_baseline_density(box, 0.0), 4.0 / (kPi * kPi * kPi), 1e-14));
  CHECK(close_rel(qkl::box_baseline_density(box, kPi), 1.0 / (4.0 * kPi), 1e-13));
  CHECK(close_rel(qkl::box_baseline_density(box, -kPi), 1.0 / (4.0 * kPi), 1e-13));
  // Even in p.
  CHECK(qkl::box_baseline_density(box, 1.234) == qkl::box_baseline_density(box, -1.234));
}

TEST_CASE("box baseline density is continuous across the series guard") {
  // The implementation switches to a local series within 1e-3 of |p| = pi;
  // values straddling the switch must agree to far better than the local
  // slope allows a genuine jump to hide.
  const qkl::BoxParams box{1.0, 1, 0.0};
  const double boundary = kPi - 1e-3;
  const double inside = qkl::box_baseline_density(box, boundary + 1e-9);
  const double outside = qkl::box_baseline_density(box, boundary - 1e-9);
  CHECK(std::abs(inside - outside) <= 1e-10);
}

TEST_CASE("box deformed density matches the reference value") {
  // 50-digit reference at beta = 0.005, p = 1.3.
  CHECK(close_rel(qkl::box_deformed_density({1.0, 1, 0.005}, 1.3),
                  0.11648499655355177936, 1e-13));
}

TEST_CASE("box deformed density reduces to the baseline at beta = 0") {
  const qkl::BoxParams deformed{1.0, 1, 0.0};
  const qkl::BoxParams baseline{1.0, 1, 0.0};
  for (double p : {0.0, 0.5, 2.0, kPi, 7.7}) {
    CHECK(qkl::box_deformed_density(deformed, p) ==
          qkl::box_baseline_density(baseline, p));
  }
}

TEST_CASE("box formulas are specialised to a = 1, n = 1") {
  CHECK_THROWS_AS(qkl::box_baseline_density({2.0, 1, 0.0}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(qkl::box_deformed_density({1.0, 2, 0.01}, 0.5), std::invalid_argument);
}

TEST_CASE("box wavefunction modulus squared equals the deformed density") {
  const qkl::BoxParams box{1.0, 1, 0.01};
  for (double p : {0.0, 0.4, 1.9, 3.0, 4.5}) {
    CAPTURE(p);
    const std::complex<double> psi = qkl::box_deformed_wavefunction(box, p);
    CHECK(close_rel(std::norm(psi), qkl::box_deformed_density(box, p), 1e-12));
  }
  // Beyond the positivity radius the square-root prefactor turns imaginary.
  CHECK_THROWS_AS(qkl::box_deformed_wavefunction(box, 6.8), std::domain_error);
}

TEST_CASE("model catalogue registers both families with correct supports") {
  const auto catalogue = qkl::model_catalogue(1.0);
  REQUIRE(catalogue.size() == 2);
  const auto& osc = qkl::lookup_model(catalogue, "gup_oscillator");
  const auto& box = qkl::lookup_model(catalogue, "nonlocal_box");

  const qkl::DensityPair osc_pair = osc.at(0.01);
  CHECK_FALSE(osc_pair.support.truncated);
  CHECK(std::isinf(osc_pair.support.hi));
  CHECK(osc_pair.recommended_splits.empty());

  const double beta = 1e-3;
  const qkl::DensityPair box_pair = box.at(beta);
  CHECK(box_pair.support.truncated);
  CHECK(close_rel(box_pair.support.hi, 0.9 / std::sqrt(3.0 * beta), 1e-15));
  CHECK(box_pair.support.lo == -box_pair.support.hi);

  const qkl::DensityPair box_free = box.at(0.0);
  CHECK_FALSE(box_free.support.truncated);
}

TEST_CASE("box split points include density zeros on both branches") {
  const auto catalogue = qkl::model_catalogue(1.0);
  const qkl::DensityPair pair = qkl::lookup_model(catalogue, "nonlocal_box").at(1e-3);
  const auto& splits = pair.recommended_splits;
  REQUIRE_FALSE(splits.empty());
  CHECK(std::is_sorted(splits.begin(), splits.end()));
  CHECK(std::adjacent_find(splits.begin(), splits.end()) == splits.end());

  // Baseline spectral points and the two solutions of p(1 - 3 beta p^2) = pi
  // (rising and falling branch); the falling-branch root is near the support
  // edge. Roots computed independently to 16 digits.
  for (double v : {kPi, 3.0 * kPi, 5.0 * kPi, 3.2440085121446551, 16.417969133963011}) {
    CAPTURE(v);
    CHECK(contains_value(splits, v, 1e-9));
    CHECK(contains_value(splits, -v, 1e-9));
  }
  // All splits live strictly inside the support.
  CHECK(splits.front() > pair.support.lo);
  CHECK(splits.back() < pair.support.hi);
}

TEST_CASE("deformed box density is non-negative across its support") {
  const auto catalogue = qkl::model_catalogue(1.0);
  const qkl::DensityPair pair = qkl::lookup_model(catalogue, "nonlocal_box").at(1e-3);
  const double P = pair.support.hi;
  double min_density = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double p = -P + (2.0 * P) * static_cast<double>(i) / 2000.0;
    min_density = std::min(min_density, pair.deformed_pdf(p));
  }
  CHECK(min_density >= 0.0);
}

TEST_CASE("lookup of unknown models lists the registered names") {
  const auto catalogue = qkl::model_catalogue(1.0);
  try {
    (void)qkl::lookup_model(catalogue, "does_not_exist");
    CHECK(false);
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    CHECK(what.find("does_not_exist") != std::string::npos);
    CHECK(what.find("gup_oscillator") != std::string::npos);
    CHECK(what.find("nonlocal_box") != std::string::npos);
  }
}

TEST_CASE("oscillator pair at beta = 0 shares the baseline exactly") {
  const auto catalogue = qkl::model_catalogue(1.0);
  const qkl::DensityPair pair = qkl::lookup_model(catalogue, "gup_oscillator").at(0.0);
  for (double p : {0.0, 0.3, 1.1, 2.5}) {
    CHECK(pair.deformed_pdf(p) == pair.baseline_pdf(p));
    CHECK(pair.log_deformed_pdf(p) == pair.log_baseline_pdf(p));
  }
}
