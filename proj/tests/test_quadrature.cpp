#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "qkl/quadrature.hpp"

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST_CASE("validate rejects malformed specs") {
  const qkl::QuadratureSpec good;
  CHECK_NOTHROW(qkl::validate(good));

  qkl::QuadratureSpec bad = good;
  bad.abs_tol = 0.0;
  CHECK_THROWS_AS(qkl::validate(bad), std::invalid_argument);

  bad = good;
  bad.rel_tol = -1e-9;
  CHECK_THROWS_AS(qkl::validate(bad), std::invalid_argument);

  bad = good;
  bad.max_subdivisions = 0;
  CHECK_THROWS_AS(qkl::validate(bad), std::invalid_argument);

  bad = good;
  bad.truncation_radius = 0.0;
  CHECK_THROWS_AS(qkl::validate(bad), std::invalid_argument);

  bad = good;
  bad.split_points = {1.0, 1.0};
  CHECK_THROWS_AS(qkl::validate(bad), std::invalid_argument);

  bad = good;
  bad.split_points = {2.0, 1.0};
  CHECK_THROWS_AS(qkl::validate(bad), std::invalid_argument);

  bad = good;
  bad.split_points = {std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(qkl::validate(bad), std::invalid_argument);
}

TEST_CASE("integrate_interval requires an ordered interval") {
  const qkl::QuadratureSpec spec;
  const qkl::Integrand one = [](double) { return 1.0; };
  CHECK_THROWS_AS(qkl::integrate_interval(one, 1.0, 1.0, spec), std::invalid_argument);
  CHECK_THROWS_AS(qkl::integrate_interval(one, 2.0, 1.0, spec), std::invalid_argument);
}

TEST_CASE("low-degree polynomials integrate exactly in one panel") {
  const qkl::QuadratureSpec spec;
  const auto res =
      qkl::integrate_interval([](double x) { return x * x * x; }, 0.0, 1.0, spec);
  CHECK(res.converged);
  CHECK(res.diagnostic.empty());
  CHECK(std::abs(res.value - 0.25) <= 1e-15);
  CHECK(res.evaluations == 15);
}

TEST_CASE("gaussian integrates to sqrt(pi) over the full line") {
  const qkl::QuadratureSpec spec;
  const auto res = qkl::integrate_line([](double x) { return std::exp(-x * x); }, spec);
  CHECK(res.converged);
  CHECK(std::abs(res.value - std::sqrt(kPi)) <= 1e-13 * std::sqrt(kPi));
  CHECK(res.evaluations % 15 == 0);
}

TEST_CASE("explicit truncation radius clips the domain") {
  qkl::QuadratureSpec spec;
  spec.truncation_radius = 10.0;
  const auto res =
      qkl::integrate_line([](double x) { return 1.0 / (1.0 + x * x); }, spec);
  CHECK(res.converged);
  const double clipped = 2.0 * std::atan(10.0);
  CHECK(std::abs(res.value - clipped) <= 1e-13 * clipped);
}

TEST_CASE("interior split points make kinked integrands exact") {
  qkl::QuadratureSpec spec;
  spec.split_points = {0.0};
  const auto res =
      qkl::integrate_interval([](double x) { return std::abs(x); }, -1.0, 1.0, spec);
  CHECK(res.converged);
  CHECK(std::abs(res.value - 1.0) <= 1e-15);
  CHECK(res.evaluations == 30);
}

TEST_CASE("integrable endpoint singularity converges") {
  const qkl::QuadratureSpec spec;
  const auto res =
      qkl::integrate_interval([](double x) { return std::log(x); }, 0.0, 1.0, spec);
  CHECK(res.converged);
  CHECK(std::abs(res.value + 1.0) <= 1e-8);
}

TEST_CASE("repeated runs are bit-identical") {
  const qkl::QuadratureSpec spec;
  const qkl::Integrand f = [](double x) { return std::exp(-x * x) * std::cos(3.0 * x); };
  const auto a = qkl::integrate_line(f, spec);
  const auto b = qkl::integrate_line(f, spec);
  CHECK(a.value == b.value);
  CHECK(a.error_estimate == b.error_estimate);
  CHECK(a.evaluations == b.evaluations);
  // Closed form sqrt(pi) exp(-9/4).
  const double expected = std::sqrt(kPi) * std::exp(-2.25);
  CHECK(std::abs(a.value - expected) <= 1e-12 * expected);
}

TEST_CASE("non-finite samples surface as diagnostics, not exceptions") {
  const qkl::QuadratureSpec spec;
  const auto res = qkl::integrate_interval(
      [](double x) {
        return x < 0.5 ? 1.0 : std::numeric_limits<double>::quiet_NaN();
      },
      0.0, 1.0, spec);
  CHECK_FALSE(res.converged);
  CHECK(res.diagnostic.find("non-finite") != std::string::npos);
}

TEST_CASE("slowly decaying tails are grown until they stop contributing") {
  const qkl::QuadratureSpec spec;
  const auto res =
      qkl::integrate_line([](double x) { return 1.0 / (1.0 + x * x); }, spec);
  CHECK(res.converged);
  CHECK(std::abs(res.value - kPi) <= 1e-10);
}

TEST_CASE("exhausted budgets are reported, not silently accepted") {
  qkl::QuadratureSpec spec;
  spec.max_subdivisions = 1;
  spec.abs_tol = 1e-15;
  spec.rel_tol = 1e-15;
  const auto res =
      qkl::integrate_interval([](double x) { return std::log(x); }, 0.0, 1.0, spec);
  CHECK_FALSE(res.converged);
  CHECK_FALSE(res.diagnostic.empty());
}
