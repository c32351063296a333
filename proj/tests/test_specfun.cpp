#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "qkl/specfun.hpp"

namespace {

bool close_rel(double x, double golden, double rel) {
  return std::abs(x - golden) <= rel * std::abs(golden);
}

}  // namespace

TEST_CASE("log_gamma matches high-precision reference values") {
  struct Row {
    double x;
    double value;
  };
  // Reference values computed with 50-digit arbitrary-precision arithmetic.
  const Row rows[] = {
      {0.001, 6.9071788853838536825},
      {0.5, 0.57236494292470008707},
      {1.5, -0.12078223763524522235},
      {10.0, 12.801827480081469611},
      {100.0, 359.13420536957539878},
      {1e4, 82099.717496442377273},
      {1e6, 12815504.56914761166},
  };
  for (const auto& row : rows) {
    CAPTURE(row.x);
    CHECK(close_rel(qkl::log_gamma(row.x), row.value, 1e-13));
  }
  CHECK(std::abs(qkl::log_gamma(1.0)) <= 1e-14);
  CHECK(std::abs(qkl::log_gamma(2.0)) <= 1e-14);
}

TEST_CASE("log_gamma rejects non-positive arguments") {
  CHECK_THROWS_AS(qkl::log_gamma(0.0), std::domain_error);
  CHECK_THROWS_AS(qkl::log_gamma(-1.5), std::domain_error);
}

TEST_CASE("log_gamma_ratio half-step reference values") {
  struct Row {
    double z;
    double value;
  };
  const Row rows[] = {
      {0.51, -0.55866412587587038542},
      {2.5, 0.40846431008702614978},
      {10.5, 1.1637873536717516621},
      {100.5, 2.3038350877858685888},
      {1e4, 4.6051576859880965764},
      {1000000.5, 6.907755403982137052},
  };
  for (const auto& row : rows) {
    CAPTURE(row.z);
    CHECK(close_rel(qkl::log_gamma_ratio(row.z, 0.5), row.value, 1e-13));
  }
}

TEST_CASE("log_gamma_ratio agrees with direct subtraction at moderate z") {
  for (double z : {0.7, 1.3, 4.0, 20.0, 123.456}) {
    CAPTURE(z);
    const double direct = qkl::log_gamma(z + 0.5) - qkl::log_gamma(z);
    CHECK(close_rel(qkl::log_gamma_ratio(z, 0.5), direct, 1e-12));
  }
}

TEST_CASE("log_gamma_ratio unit step telescopes to a plain logarithm") {
  for (double z : {0.5, 3.0, 50.0, 1e5}) {
    CAPTURE(z);
    CHECK(close_rel(qkl::log_gamma_ratio(z, 1.0), std::log(z), 1e-13));
  }
}

TEST_CASE("log_gamma_ratio keeps absolute precision at large z") {
  // |ln G(z+1/2) - ln G(z) - (1/2) ln z| <= 1/(8z) for z >= 1; a subtractive
  // implementation loses this bound long before z = 1e6.
  for (double z : {1e2, 1e3, 1e4, 1e5, 1e6}) {
    CAPTURE(z);
    const double gap = std::abs(qkl::log_gamma_ratio(z, 0.5) - 0.5 * std::log(z));
    CHECK(gap <= 1.0001 / (8.0 * z));
  }
}

TEST_CASE("log_gamma_ratio rejects arguments outside the domain") {
  CHECK_THROWS_AS(qkl::log_gamma_ratio(0.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(qkl::log_gamma_ratio(0.25, -0.25), std::domain_error);
}

TEST_CASE("gegenbauer matches reference values") {
  // C_3^{3/2}(1/2) = -25/16 exactly.
  CHECK(close_rel(qkl::gegenbauer(3, 1.5, 0.5), -1.5625, 1e-14));
  CHECK(close_rel(qkl::gegenbauer(6, 12.0, 0.9), 217839.300224, 1e-12));
  CHECK(close_rel(qkl::gegenbauer(4, 0.7, -0.9), 0.58979494, 1e-12));
  // Large order, tiny argument: C_2^{1e6}(1e-3) = 1000002 exactly.
  CHECK(close_rel(qkl::gegenbauer(2, 1e6, 0.001), 1000002.0, 1e-12));
}

TEST_CASE("gegenbauer base cases and endpoint value") {
  CHECK(qkl::gegenbauer(0, 3.7, -0.2) == 1.0);
  CHECK(close_rel(qkl::gegenbauer(1, 3.7, -0.2), 2.0 * 3.7 * -0.2, 1e-15));
  // C_n^{lambda}(1) = binom(n + 2 lambda - 1, n); for n = 2, lambda = 3/2
  // that is binom(4, 2) = 6.
  CHECK(close_rel(qkl::gegenbauer(2, 1.5, 1.0), 6.0, 1e-14));
}

TEST_CASE("gegenbauer rejects invalid degree, order, and argument") {
  CHECK_THROWS_AS(qkl::gegenbauer(-1, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(qkl::gegenbauer(2, 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(qkl::gegenbauer(2, -0.5, 0.0), std::domain_error);
  CHECK_THROWS_AS(qkl::gegenbauer(2, 1.0, 1.5), std::domain_error);
}

TEST_CASE("duplication identity residual stays tiny across six decades") {
  for (double lam : {0.5, 1.0, 10.0, 1e2, 1e3, 1e4, 1e5, 1e6}) {
    CAPTURE(lam);
    CHECK(std::abs(qkl::duplication_residual(lam)) <= 1e-9);
  }
}
