#include <doctest.h>

#include <cmath>
#include <optional>

#include "dimv/dper.hpp"
#include "dimv/errors.hpp"
#include "dimv/evaluation.hpp"
#include "dimv/masked_matrix.hpp"
#include "test_support.hpp"

using dimv::MaskedMatrix;
using dimv::PairStats;

namespace {
constexpr auto NA = std::nullopt;

// Independent eta re-derivation, term by term in a different arrangement:
// eta = -m/2 log(d) - (s22 - 2 r s12 + r^2 s11) / (2 d), d = s22v - s12v^2/s11v.
double eta_oracle(double sigma12, const PairStats& s, double v11, double v22) {
  const double d = v22 - (sigma12 / v11) * sigma12;
  const double r = sigma12 / v11;
  double quad = s.s22;
  quad -= 2.0 * r * s.s12;
  quad += r * r * s.s11;
  return -(static_cast<double>(s.m) / 2.0) * std::log(d) - quad / (2.0 * d);
}

}  // namespace

TEST_CASE("pair_stats sums over co-observed rows only") {
  const MaskedMatrix x =
      dimv::build_masked({{1.0, 2.0}, {-1.0, -2.0}, {NA, 5.0}});
  const PairStats s = dimv::pair_stats(x, 0, 1);
  CHECK(s.m == 2);
  CHECK(s.s11 == 2.0);
  CHECK(s.s12 == 4.0);
  CHECK(s.s22 == 8.0);
  CHECK(s.n == 2);
  CHECK(s.l_other == 3);
}

TEST_CASE("pair_stats with disjoint observation sets") {
  const MaskedMatrix x = dimv::build_masked({{1.0, NA}, {NA, 2.0}});
  const PairStats s = dimv::pair_stats(x, 0, 1);
  CHECK(s.m == 0);
  CHECK(s.s11 == 0.0);
  CHECK(s.s12 == 0.0);
  CHECK(s.s22 == 0.0);
}

TEST_CASE("pair_stats on complete columns") {
  const MaskedMatrix x = dimv::build_masked(
      {{1.0, 2.0}, {0.5, -1.0}, {-1.5, 0.5}, {0.0, -1.5}});
  const PairStats s = dimv::pair_stats(x, 0, 1);
  CHECK(s.m == 4);
  CHECK(s.n == 4);
  CHECK(s.l_other == 4);
}

TEST_CASE("eta at the worked example") {
  PairStats s;
  s.m = 2;
  s.s11 = 2.0;
  s.s12 = 0.0;
  s.s22 = 2.0;
  CHECK(dimv::eta(0.0, s, 1.0, 1.0) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("eta rejects values outside the admissible band") {
  PairStats s;
  s.m = 3;
  s.s11 = s.s22 = 3.0;
  CHECK_THROWS_AS(dimv::eta(1.0, s, 1.0, 1.0), dimv::DomainError);
  CHECK_THROWS_AS(dimv::eta(1.5, s, 1.0, 1.0), dimv::DomainError);
}

TEST_CASE("eta matches an independent re-derivation on random inputs") {
  dimv::Rng rng(314);
  for (int trial = 0; trial < 500; ++trial) {
    PairStats s;
    s.m = 2 + static_cast<Eigen::Index>(rng.bounded(50));
    const double a = std::abs(rng.normal()) + 0.1;
    const double b = std::abs(rng.normal()) + 0.1;
    const double corr = 1.8 * rng.uniform() - 0.9;
    s.s11 = a * static_cast<double>(s.m);
    s.s22 = b * static_cast<double>(s.m);
    s.s12 = corr * std::sqrt(s.s11 * s.s22);
    const double v11 = std::abs(rng.normal()) + 0.2;
    const double v22 = std::abs(rng.normal()) + 0.2;
    const double band = std::sqrt(v11 * v22);
    const double sigma12 = 0.99 * band * (2.0 * rng.uniform() - 1.0);
    const double expected = eta_oracle(sigma12, s, v11, v22);
    CHECK(dimv::eta(sigma12, s, v11, v22) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("solve_sigma12 returns the sample covariance on complete data") {
  PairStats s;
  s.m = s.n = s.l_other = 2;
  s.s11 = 2.0;
  s.s22 = 2.0;
  s.s12 = 1.0;
  CHECK(dimv::solve_sigma12(s, 1.0, 1.0, 0.0) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("solve_sigma12 returns zero when s12 is zero") {
  PairStats s;
  s.m = s.n = s.l_other = 5;
  s.s11 = 4.0;
  s.s22 = 6.0;
  s.s12 = 0.0;
  CHECK(dimv::solve_sigma12(s, 1.0, 1.3, 0.3) == doctest::Approx(0.0));
}

TEST_CASE("solve_sigma12 returns zero when no rows are co-observed") {
  PairStats s;
  s.m = 0;
  s.n = 3;
  s.l_other = 4;
  CHECK(dimv::solve_sigma12(s, 1.0, 1.0, 0.7) == 0.0);
}

TEST_CASE("solve_sigma12 output is a cubic root that maximizes eta") {
  dimv::Rng rng(2718);
  for (int trial = 0; trial < 200; ++trial) {
    // Stats from an actual bivariate sample with missing values.
    const Eigen::Index n = 8 + static_cast<Eigen::Index>(rng.bounded(40));
    const double rho = 1.6 * rng.uniform() - 0.8;
    Eigen::MatrixXd sigma_true(2, 2);
    sigma_true << 1.0, rho, rho, 1.0;
    const Eigen::MatrixXd data =
        testsup::sample_mvn(rng, n, Eigen::VectorXd::Zero(2), sigma_true);
    dimv::BoolMatrix mask(n, 2);
    Eigen::Index co = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      mask(i, 0) = rng.uniform() < 0.8;
      mask(i, 1) = rng.uniform() < 0.8;
      if (mask(i, 0) && mask(i, 1)) ++co;
    }
    if (co < 3) continue;
    MaskedMatrix x(data, mask);
    // Center on available means so the centered-input precondition holds.
    const auto std_ = dimv::fit_standardizer(x);
    Eigen::MatrixXd centered = x.values;
    centered.rowwise() -= std_.means.transpose();
    x = MaskedMatrix(centered, mask);

    const PairStats s = dimv::pair_stats(x, 0, 1);
    double v11 = 0.0, v22 = 0.0;
    Eigen::Index c1 = 0, c2 = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (mask(i, 0)) {
        v11 += centered(i, 0) * centered(i, 0);
        ++c1;
      }
      if (mask(i, 1)) {
        v22 += centered(i, 1) * centered(i, 1);
        ++c2;
      }
    }
    v11 /= static_cast<double>(c1);
    v22 /= static_cast<double>(c2);
    if (v11 <= 0.0 || v22 <= 0.0) continue;

    const double fallback = dimv::case_deletion_cov(x, 0, 1);
    const double root = dimv::solve_sigma12(s, v11, v22, fallback);

    // Root of the cubic (scaled residual).
    const double m = static_cast<double>(s.m);
    const double c3 = m, c2c = -s.s12,
                 c1c = s.s22 * v11 + s.s11 * v22 - m * v11 * v22,
                 c0c = -s.s12 * v11 * v22;
    const double residual =
        std::abs(((c3 * root + c2c) * root + c1c) * root + c0c);
    const double scale = std::max(
        {1.0, std::abs(c3), std::abs(c2c), std::abs(c1c), std::abs(c0c)});
    CHECK(residual < 1e-8 * scale);

    // Maximizes eta against a dense grid over the admissible band.
    const double grid_best = testsup::grid_eta_max(s, v11, v22, 20000);
    CHECK(dimv::eta(root, s, v11, v22) >= grid_best - 1e-6);
  }
}

TEST_CASE("case_deletion_cov recenters on the co-observed subsample") {
  const MaskedMatrix x =
      dimv::build_masked({{1.0, 2.0}, {2.0, 4.0}, {NA, 7.0}, {5.0, NA}});
  CHECK(dimv::case_deletion_cov(x, 0, 1) == doctest::Approx(0.5));
}

TEST_CASE("case_deletion_cov degenerates to zero below two rows") {
  const MaskedMatrix x =
      dimv::build_masked({{1.0, 2.0}, {NA, 4.0}, {5.0, NA}});
  CHECK(dimv::case_deletion_cov(x, 0, 1) == 0.0);
}

TEST_CASE("case_deletion_cov equals the sample covariance on complete data") {
  dimv::Rng rng(5);
  const Eigen::MatrixXd data = testsup::sample_mvn(
      rng, 50, Eigen::VectorXd::Zero(2), testsup::random_spd(rng, 2));
  const MaskedMatrix x = dimv::from_complete(data);
  const Eigen::MatrixXd cov = testsup::sample_covariance(data);
  CHECK(dimv::case_deletion_cov(x, 0, 1) ==
        doctest::Approx(cov(0, 1)).epsilon(1e-12));
}

TEST_CASE("dper_fit reproduces sample moments on complete data") {
  dimv::Rng rng(31);
  const Eigen::MatrixXd sigma_true = testsup::random_spd(rng, 4);
  Eigen::VectorXd mu_true(4);
  mu_true << 1.0, -2.0, 0.5, 3.0;
  const Eigen::MatrixXd data = testsup::sample_mvn(rng, 120, mu_true, sigma_true);
  const auto [mu, sigma] = dimv::dper_fit(dimv::from_complete(data));
  const Eigen::VectorXd mean = testsup::sample_mean(data);
  const Eigen::MatrixXd cov = testsup::sample_covariance(data);
  CHECK((mu.mu - mean).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((sigma.matrix() - cov).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("dper_fit gives zero covariance to disjointly observed features") {
  const MaskedMatrix x = dimv::build_masked(
      {{1.0, NA}, {2.0, NA}, {NA, 5.0}, {NA, 6.0}});
  const auto [mu, sigma] = dimv::dper_fit(x);
  CHECK(sigma(0, 1) == 0.0);
}

TEST_CASE("dper_fit rejects fully missing features") {
  CHECK_THROWS_AS(dimv::dper_fit(dimv::build_masked({{1.0, NA}, {2.0, NA}})),
                  dimv::EstimationError);
}

TEST_CASE("dper_fit handles constant features") {
  const MaskedMatrix x = dimv::build_masked(
      {{7.0, 1.0}, {7.0, 2.0}, {7.0, NA}, {7.0, 4.0}});
  const auto [mu, sigma] = dimv::dper_fit(x);
  CHECK(mu.mu[0] == 7.0);
  CHECK(sigma(0, 0) == 0.0);
  CHECK(sigma(0, 1) == 0.0);
}

TEST_CASE("covariance symmetry is exact") {
  dimv::Rng rng(77);
  const MaskedMatrix x = testsup::random_masked_mvn(
      rng, 300, testsup::equicorrelated(6, 0.4), 0.3, 91);
  const auto [mu, sigma] = dimv::dper_fit(x);
  for (Eigen::Index i = 0; i < 6; ++i) {
    for (Eigen::Index j = 0; j < 6; ++j) {
      CHECK(sigma(i, j) == sigma(j, i));  // bitwise
      CHECK(std::abs(sigma(i, j)) <=
            std::sqrt(sigma(i, i) * sigma(j, j)) + 1e-15);
    }
  }
}

TEST_CASE("dper_fit is deterministic and row-order invariant") {
  dimv::Rng rng(13);
  const MaskedMatrix x = testsup::random_masked_mvn(
      rng, 150, testsup::equicorrelated(5, 0.5), 0.25, 17);
  const auto [mu1, sigma1] = dimv::dper_fit(x);
  const auto [mu2, sigma2] = dimv::dper_fit(x);
  CHECK(mu1.mu == mu2.mu);
  CHECK(sigma1.matrix() == sigma2.matrix());

  // Reverse the row order.
  Eigen::MatrixXd values = x.values.colwise().reverse();
  dimv::BoolMatrix mask = x.mask.colwise().reverse();
  const auto [mu3, sigma3] = dimv::dper_fit(MaskedMatrix(values, mask));
  CHECK((mu1.mu - mu3.mu).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((sigma1.matrix() - sigma3.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dper_fit beats case deletion in Frobenius distance to the truth") {
  dimv::Rng rng(404);
  const Eigen::MatrixXd sigma_true = testsup::equicorrelated(5, 0.6);
  int dper_wins = 0;
  const int trials = 5;
  for (int t = 0; t < trials; ++t) {
    const Eigen::MatrixXd data = testsup::sample_mvn(
        rng, 2000, Eigen::VectorXd::Zero(5), sigma_true);
    const dimv::BoolMatrix missing =
        dimv::mcar_mask(2000, 5, 0.2, 1000 + static_cast<std::uint64_t>(t));
    const MaskedMatrix x = dimv::apply_missing(data, missing);
    const auto [mu_d, sigma_d] = dimv::dper_fit(x);
    const auto [mu_c, sigma_c] = dimv::complete_case_cov(x);
    const double err_d = (sigma_d.matrix() - sigma_true).norm();
    const double err_c = (sigma_c.matrix() - sigma_true).norm();
    if (err_d < err_c) ++dper_wins;
  }
  CHECK(dper_wins >= 3);
}
