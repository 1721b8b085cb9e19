#include <doctest.h>

#include <cmath>

#include "dimv/conditional.hpp"
#include "dimv/confidence.hpp"
#include "dimv/errors.hpp"
#include "dimv/rng.hpp"
#include "test_support.hpp"

using dimv::CovarianceMatrix;
using dimv::FeatureSet;

namespace {

CovarianceMatrix bivariate(double v1, double cov, double v2) {
  Eigen::MatrixXd m(2, 2);
  m << v1, cov, cov, v2;
  return CovarianceMatrix(std::move(m));
}

}  // namespace

TEST_CASE("conditional_ridge_mean scalar cases") {
  const CovarianceMatrix sigma = bivariate(1.0, 0.5, 1.0);
  Eigen::MatrixXd z(1, 1);
  z << 2.0;
  const Eigen::VectorXd plain =
      dimv::conditional_ridge_mean(sigma, {0}, 1, z, 0.0);
  CHECK(plain[0] == doctest::Approx(1.0).epsilon(1e-14));
  const Eigen::VectorXd shrunk =
      dimv::conditional_ridge_mean(sigma, {0}, 1, z, 1.0);
  CHECK(shrunk[0] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("exact collinearity is singular at alpha zero, finite above") {
  Eigen::MatrixXd m(3, 3);
  // Features 0 and 1 are exact duplicates.
  m << 1.0, 1.0, 0.5,  //
      1.0, 1.0, 0.5,   //
      0.5, 0.5, 1.0;
  const CovarianceMatrix sigma{Eigen::MatrixXd(m)};
  Eigen::MatrixXd z(1, 2);
  z << 1.0, 1.0;
  CHECK_THROWS_AS(dimv::conditional_ridge_mean(sigma, {0, 1}, 2, z, 0.0),
                  dimv::SingularityError);
  const Eigen::VectorXd out =
      dimv::conditional_ridge_mean(sigma, {0, 1}, 2, z, 0.1);
  CHECK(std::isfinite(out[0]));
}

TEST_CASE("conditional_covariance closed forms") {
  const CovarianceMatrix sigma = bivariate(1.0, 0.5, 1.0);
  const Eigen::MatrixXd cond =
      dimv::conditional_covariance(sigma, {0}, {1}, 0.0);
  CHECK(cond(0, 0) == doctest::Approx(0.75).epsilon(1e-14));

  const CovarianceMatrix indep = bivariate(2.0, 0.0, 3.0);
  CHECK(dimv::conditional_covariance(indep, {0}, {1}, 0.0)(0, 0) ==
        doctest::Approx(3.0));
}

TEST_CASE("conditional mean and covariance match the dense Schur oracle") {
  dimv::Rng rng(808);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index p =
        4 + static_cast<Eigen::Index>(rng.bounded(5));  // up to 8
    const Eigen::MatrixXd spd = testsup::random_spd(rng, p);
    const CovarianceMatrix sigma{Eigen::MatrixXd(spd)};

    std::vector<Eigen::Index> observed, targets;
    for (Eigen::Index j = 0; j < p; ++j) {
      (rng.uniform() < 0.5 ? observed : targets).push_back(j);
    }
    if (observed.empty() || targets.empty()) continue;

    const Eigen::VectorXd u_obs =
        rng.normal_vector(static_cast<Eigen::Index>(observed.size()));
    const auto [mean_oracle, cov_oracle] =
        testsup::schur_conditional(spd, observed, targets, u_obs);

    const Eigen::MatrixXd cov =
        dimv::conditional_covariance(sigma, observed, targets, 0.0);
    CHECK((cov - cov_oracle).cwiseAbs().maxCoeff() < 1e-9);

    for (std::size_t t = 0; t < targets.size(); ++t) {
      const Eigen::VectorXd mean = dimv::conditional_ridge_mean(
          sigma, observed, targets[t], u_obs.transpose(), 0.0);
      CHECK(std::abs(mean[0] - mean_oracle[static_cast<Eigen::Index>(t)]) <
            1e-9);
    }
  }
}

TEST_CASE("coefficients with identity predictor covariance") {
  Eigen::MatrixXd m(3, 3);
  m << 1.0, 0.0, 0.5,  //
      0.0, 1.0, 0.2,   //
      0.5, 0.2, 1.0;
  const CovarianceMatrix sigma{Eigen::MatrixXd(m)};
  const auto plain = dimv::coefficients(sigma, 2, {0, 1}, 0.0);
  CHECK(plain.beta[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(plain.beta[1] == doctest::Approx(0.2).epsilon(1e-14));
  const auto shrunk = dimv::coefficients(sigma, 2, {0, 1}, 1.0);
  CHECK(shrunk.beta[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(shrunk.beta[1] == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(shrunk.alpha_used == 1.0);
}

TEST_CASE("coefficients reproduce conditional_ridge_mean predictions") {
  dimv::Rng rng(909);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index p = 5;
    const CovarianceMatrix sigma{testsup::random_spd(rng, p)};
    const FeatureSet predictors{0, 2, 3};
    const double alpha = rng.uniform() * 2.0;
    const auto report = dimv::coefficients(sigma, 1, predictors, alpha);
    Eigen::MatrixXd z(1, 3);
    z << rng.normal(), rng.normal(), rng.normal();
    const Eigen::VectorXd mean =
        dimv::conditional_ridge_mean(sigma, predictors, 1, z, alpha);
    CHECK(std::abs(mean[0] - z.row(0).dot(report.beta)) < 1e-12);
  }
}

TEST_CASE("ridge coefficient norm shrinks monotonically in alpha") {
  dimv::Rng rng(616);
  for (int trial = 0; trial < 25; ++trial) {
    const CovarianceMatrix sigma{testsup::random_spd(rng, 6)};
    const FeatureSet predictors{0, 1, 3, 5};
    double previous = std::numeric_limits<double>::infinity();
    for (double alpha : {0.0, 0.1, 1.0, 10.0}) {
      const double norm =
          dimv::coefficients(sigma, 2, predictors, alpha).beta.norm();
      CHECK(norm <= previous + 1e-12);
      previous = norm;
    }
  }
}

TEST_CASE("redundant feature delta vanishes in the stated degenerate cases") {
  dimv::Rng rng(55);
  const Eigen::MatrixXd spd = testsup::random_spd(rng, 4);
  // Layout: core = {0, 1}, extra = 2, target = 3.
  const FeatureSet core{0, 1};

  SUBCASE("correlation explained by the core") {
    // Choose sigma(3,2) = Sigma_mo Sigma_o^-1 Sigma_oe exactly.
    Eigen::MatrixXd m = spd;
    const Eigen::Matrix2d so = m.topLeftCorner<2, 2>();
    const Eigen::Vector2d soe(m(0, 2), m(1, 2));
    const Eigen::Vector2d som(m(0, 3), m(1, 3));
    const double eps = som.dot(so.inverse() * soe);
    m(2, 3) = eps;
    m(3, 2) = eps;
    const CovarianceMatrix sigma{Eigen::MatrixXd(m)};
    const Eigen::Vector2d x_core(rng.normal(), rng.normal());
    const auto report = dimv::redundant_feature_delta(
        sigma, 3, core, 2, x_core, rng.normal());
    CHECK(std::abs(report.numerator_corr_part) < 1e-12);
    CHECK(std::abs(report.delta) < 1e-10);
  }

  SUBCASE("extra value explained by the core") {
    const CovarianceMatrix sigma{Eigen::MatrixXd(spd)};
    const Eigen::Vector2d x_core(rng.normal(), rng.normal());
    const Eigen::Matrix2d so = spd.topLeftCorner<2, 2>();
    const Eigen::Vector2d soe(spd(0, 2), spd(1, 2));
    const double x_extra = soe.dot(so.inverse() * x_core);
    const auto report =
        dimv::redundant_feature_delta(sigma, 3, core, 2, x_core, x_extra);
    CHECK(std::abs(report.numerator_resid_part) < 1e-10);
    CHECK(std::abs(report.delta) < 1e-9);
  }
}

TEST_CASE("redundant feature delta equals the direct two-mean difference") {
  dimv::Rng rng(181);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index p = 3 + static_cast<Eigen::Index>(rng.bounded(4));
    const Eigen::MatrixXd spd = testsup::random_spd(rng, p);
    const CovarianceMatrix sigma{Eigen::MatrixXd(spd)};

    FeatureSet core;
    for (Eigen::Index j = 0; j < p - 2; ++j) core.push_back(j);
    const Eigen::Index extra = p - 2;
    const Eigen::Index target = p - 1;
    const Eigen::VectorXd x_core =
        rng.normal_vector(static_cast<Eigen::Index>(core.size()));
    const double x_extra = rng.normal();

    const auto report = dimv::redundant_feature_delta(sigma, target, core,
                                                      extra, x_core, x_extra);

    // Oracle: two independent conditional-mean evaluations via dense
    // inverses (with and without the extra predictor).
    std::vector<Eigen::Index> with_extra = core;
    with_extra.push_back(extra);
    Eigen::VectorXd u_with(static_cast<Eigen::Index>(with_extra.size()));
    u_with.head(x_core.size()) = x_core;
    u_with[u_with.size() - 1] = x_extra;
    const auto [mean_with, cov_with] =
        testsup::schur_conditional(spd, with_extra, {target}, u_with);
    const auto [mean_without, cov_without] =
        testsup::schur_conditional(spd, core, {target}, x_core);
    const double direct = mean_with[0] - mean_without[0];
    CHECK(std::abs(report.delta - direct) < 1e-9);

    // Report invariant.
    if (std::abs(report.gamma) > 1e-12) {
      CHECK(report.delta ==
            doctest::Approx(report.numerator_corr_part *
                            report.numerator_resid_part / report.gamma)
                .epsilon(1e-9));
    }
  }
}

TEST_CASE("redundant feature delta rejects degenerate conditioning") {
  Eigen::MatrixXd m(3, 3);
  // Extra (1) duplicates core (0): gamma = 1 - 1 = 0.
  m << 1.0, 1.0, 0.3,  //
      1.0, 1.0, 0.3,   //
      0.3, 0.3, 1.0;
  const CovarianceMatrix sigma{Eigen::MatrixXd(m)};
  Eigen::VectorXd x_core(1);
  x_core << 0.5;
  CHECK_THROWS_AS(
      dimv::redundant_feature_delta(sigma, 2, {0}, 1, x_core, 0.5),
      dimv::DomainError);
}

TEST_CASE("confidence region geometry") {
  dimv::ConditionalGaussian cond;
  cond.mean = Eigen::VectorXd::Zero(2);
  cond.cov = Eigen::MatrixXd::Identity(2, 2);
  const auto region = dimv::confidence_region(cond, 0.05);
  CHECK(region.threshold ==
        doctest::Approx(-2.0 * std::log(0.05)).epsilon(1e-8));
  CHECK(region.contains(cond.mean));  // center always inside
  Eigen::Vector2d far(10.0, 10.0);
  CHECK_FALSE(region.contains(far));

  dimv::ConditionalGaussian one_dim;
  one_dim.mean = Eigen::VectorXd::Constant(1, 2.0);
  one_dim.cov = Eigen::MatrixXd::Constant(1, 1, 0.75);
  const auto interval = dimv::confidence_region(one_dim, 0.05);
  CHECK(std::abs(interval.threshold - 3.8415) < 1e-3);
  const double half_width = std::sqrt(0.75 * interval.threshold);
  Eigen::VectorXd just_inside =
      Eigen::VectorXd::Constant(1, 2.0 + 0.999 * half_width);
  Eigen::VectorXd just_outside =
      Eigen::VectorXd::Constant(1, 2.0 + 1.001 * half_width);
  CHECK(interval.contains(just_inside));
  CHECK_FALSE(interval.contains(just_outside));
}

TEST_CASE("confidence region rejects singular conditional covariance") {
  dimv::ConditionalGaussian cond;
  cond.mean = Eigen::VectorXd::Zero(2);
  cond.cov = Eigen::MatrixXd::Ones(2, 2);  // rank one
  CHECK_THROWS_AS(dimv::confidence_region(cond, 0.05),
                  dimv::SingularityError);
}

TEST_CASE("empty predictor set yields the marginal covariance") {
  dimv::Rng rng(2);
  const Eigen::MatrixXd spd = testsup::random_spd(rng, 3);
  const CovarianceMatrix sigma{Eigen::MatrixXd(spd)};
  const Eigen::MatrixXd cov =
      dimv::conditional_covariance(sigma, {}, {0, 2}, 0.0);
  CHECK(cov(0, 0) == doctest::Approx(spd(0, 0)));
  CHECK(cov(1, 1) == doctest::Approx(spd(2, 2)));
  CHECK(cov(0, 1) == doctest::Approx(spd(0, 2)));
}
