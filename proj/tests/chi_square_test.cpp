#include <doctest.h>

#include <cmath>

#include "dimv/chi_square.hpp"
#include "dimv/errors.hpp"
#include "dimv/rng.hpp"

TEST_CASE("chi-square CDF matches closed forms") {
  // 2 dof: F(x) = 1 - exp(-x/2).
  for (double x : {0.1, 0.5, 1.0, 3.0, 7.5, 20.0}) {
    CHECK(dimv::chi_square_cdf(x, 2.0) ==
          doctest::Approx(1.0 - std::exp(-0.5 * x)).epsilon(1e-12));
  }
  // 1 dof: F(x) = erf(sqrt(x/2)).
  for (double x : {0.2, 1.0, 3.8415, 10.0}) {
    CHECK(dimv::chi_square_cdf(x, 1.0) ==
          doctest::Approx(std::erf(std::sqrt(0.5 * x))).epsilon(1e-12));
  }
  CHECK(dimv::chi_square_cdf(0.0, 3.0) == 0.0);
  CHECK(dimv::chi_square_cdf(-1.0, 3.0) == 0.0);
}

TEST_CASE("quantile inverts the CDF to the stated tolerance") {
  for (double dof : {1.0, 2.0, 3.0, 5.0, 17.0, 100.0}) {
    for (double prob : {0.001, 0.05, 0.25, 0.5, 0.9, 0.95, 0.999}) {
      const double q = dimv::chi_square_quantile(prob, dof);
      CHECK(std::abs(dimv::chi_square_cdf(q, dof) - prob) <= 1e-10);
    }
  }
}

TEST_CASE("upper 5% quantiles match the known values") {
  // 1 dof: 3.8415 (standard table value).
  CHECK(std::abs(dimv::chi_square_upper_quantile(0.05, 1.0) - 3.8415) < 1e-3);
  // 2 dof closed form: -2 ln(0.05).
  CHECK(dimv::chi_square_upper_quantile(0.05, 2.0) ==
        doctest::Approx(-2.0 * std::log(0.05)).epsilon(1e-8));
}

TEST_CASE("1-dof upper quantile agrees with a Monte Carlo tail frequency") {
  dimv::Rng rng(2024);
  const double threshold = dimv::chi_square_upper_quantile(0.05, 1.0);
  const int draws = 200000;
  int outside = 0;
  for (int i = 0; i < draws; ++i) {
    const double z = rng.normal();
    if (z * z > threshold) ++outside;
  }
  const double frequency = static_cast<double>(outside) / draws;
  CHECK(frequency == doctest::Approx(0.05).epsilon(0.08));
}

TEST_CASE("domain checks") {
  CHECK_THROWS_AS(dimv::chi_square_quantile(0.0, 1.0), dimv::DomainError);
  CHECK_THROWS_AS(dimv::chi_square_quantile(1.0, 1.0), dimv::DomainError);
  CHECK_THROWS_AS(dimv::chi_square_quantile(0.5, 0.0), dimv::DomainError);
  CHECK_THROWS_AS(dimv::chi_square_cdf(1.0, -1.0), dimv::DomainError);
  CHECK_THROWS_AS(dimv::regularized_gamma_p(-1.0, 1.0), dimv::DomainError);
}
