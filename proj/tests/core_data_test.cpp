#include <doctest.h>

#include <cmath>
#include <optional>

#include "dimv/errors.hpp"
#include "dimv/masked_matrix.hpp"
#include "dimv/rng.hpp"
#include "dimv/standardizer.hpp"
#include "test_support.hpp"

using dimv::BoolMatrix;
using dimv::MaskedMatrix;

namespace {
constexpr auto NA = std::nullopt;
}

TEST_CASE("build_masked marks present values as observed") {
  const MaskedMatrix x = dimv::build_masked({{1.0, NA}, {3.0, 4.0}});
  CHECK(x.rows() == 2);
  CHECK(x.cols() == 2);
  CHECK(x.values(0, 0) == 1.0);
  CHECK(x.values(1, 0) == 3.0);
  CHECK(x.values(1, 1) == 4.0);
  CHECK(x.mask(0, 0));
  CHECK_FALSE(x.mask(0, 1));
  CHECK(x.mask(1, 0));
  CHECK(x.mask(1, 1));
}

TEST_CASE("build_masked accepts an empty row list with a declared width") {
  const MaskedMatrix x = dimv::build_masked({}, 3);
  CHECK(x.rows() == 0);
  CHECK(x.cols() == 3);
}

TEST_CASE("build_masked rejects ragged rows") {
  CHECK_THROWS_AS(dimv::build_masked({{1.0, 2.0}, {3.0}}),
                  dimv::DimensionError);
}

TEST_CASE("build_masked rejects non-finite observed values") {
  CHECK_THROWS_AS(
      dimv::build_masked({{1.0, std::nan("")}}), dimv::ValidationError);
  CHECK_THROWS_AS(
      dimv::build_masked({{std::numeric_limits<double>::infinity()}}),
      dimv::ValidationError);
}

TEST_CASE("pattern_of negates the mask row") {
  const MaskedMatrix x = dimv::build_masked(
      {{1.0, NA, 2.0}, {1.0, 2.0, 3.0}, {NA, NA, NA}});
  const auto pattern = dimv::pattern_of(x, 0);
  CHECK_FALSE(pattern.bits[0]);
  CHECK(pattern.bits[1]);
  CHECK_FALSE(pattern.bits[2]);
  CHECK_FALSE(dimv::pattern_of(x, 1).bits.any());
  CHECK(dimv::pattern_of(x, 2).bits.all());
  CHECK_THROWS_AS(dimv::pattern_of(x, 3), dimv::IndexError);
}

TEST_CASE("patterns are equal exactly when mask rows are equal") {
  dimv::Rng rng(11);
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(20, 4);
  BoolMatrix mask(20, 4);
  for (Eigen::Index i = 0; i < 20; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) mask(i, j) = rng.uniform() < 0.6;
  }
  const MaskedMatrix x(values, mask);
  for (Eigen::Index a = 0; a < 20; ++a) {
    for (Eigen::Index b = 0; b < 20; ++b) {
      const bool same_masks = (mask.row(a) == mask.row(b)).all();
      CHECK((dimv::pattern_of(x, a) == dimv::pattern_of(x, b)) == same_masks);
    }
  }
}

TEST_CASE("fit_standardizer uses available entries only") {
  const MaskedMatrix x =
      dimv::build_masked({{2.0}, {NA}, {3.0}, {5.0}, {NA}});
  const auto s = dimv::fit_standardizer(x);
  CHECK(s.means[0] == doctest::Approx(10.0 / 3.0).epsilon(1e-14));
  CHECK(s.scales[0] == doctest::Approx(std::sqrt(14.0 / 9.0)).epsilon(1e-14));
}

TEST_CASE("fit_standardizer falls back to unit scale for constant columns") {
  const auto s =
      dimv::fit_standardizer(dimv::build_masked({{7.0}, {7.0}, {7.0}}));
  CHECK(s.means[0] == 7.0);
  CHECK(s.scales[0] == 1.0);

  const auto single = dimv::fit_standardizer(dimv::build_masked({{4.0}}));
  CHECK(single.means[0] == 4.0);
  CHECK(single.scales[0] == 1.0);
}

TEST_CASE("fit_standardizer rejects fully missing columns") {
  CHECK_THROWS_WITH_AS(
      dimv::fit_standardizer(dimv::build_masked({{1.0, NA}, {2.0, NA}})),
      doctest::Contains("feature 1"), dimv::EstimationError);
}

TEST_CASE("apply and invert map single entries as documented") {
  const dimv::Standardizer s{Eigen::VectorXd::Constant(1, 1.0),
                             Eigen::VectorXd::Constant(1, 2.0)};
  const MaskedMatrix x = dimv::build_masked({{5.0}});
  const MaskedMatrix applied = dimv::apply_standardizer(s, x);
  CHECK(applied.values(0, 0) == 2.0);
  const MaskedMatrix inverted = dimv::invert_standardizer(s, applied);
  CHECK(inverted.values(0, 0) == 5.0);
}

TEST_CASE("identity standardizer leaves the matrix unchanged") {
  const MaskedMatrix x = dimv::build_masked({{1.5, NA}, {-2.0, 4.0}});
  const auto identity = dimv::Standardizer::identity(2);
  const MaskedMatrix applied = dimv::apply_standardizer(identity, x);
  CHECK(applied.values == x.values);
}

TEST_CASE("standardizer round-trip is the identity on observed entries") {
  dimv::Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 3 + static_cast<Eigen::Index>(rng.bounded(30));
    const Eigen::Index p = 1 + static_cast<Eigen::Index>(rng.bounded(6));
    Eigen::MatrixXd values(n, p);
    BoolMatrix mask(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) {
        values(i, j) = 100.0 * rng.normal();
        mask(i, j) = rng.uniform() < 0.7;
      }
    }
    for (Eigen::Index j = 0; j < p; ++j) mask(0, j) = true;  // no empty column
    const MaskedMatrix x(values, mask);
    const auto s = dimv::fit_standardizer(x);
    const MaskedMatrix round =
        dimv::invert_standardizer(s, dimv::apply_standardizer(s, x));
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) {
        if (!mask(i, j)) continue;
        const double rel = std::abs(round.values(i, j) - values(i, j)) /
                           std::max(1.0, std::abs(values(i, j)));
        CHECK(rel < 1e-12);
      }
    }
  }
}

TEST_CASE("fit_standardizer matches classical moments on complete data") {
  dimv::Rng rng(7);
  const Eigen::MatrixXd data = testsup::sample_mvn(
      rng, 200, Eigen::VectorXd::Constant(3, 2.0),
      testsup::random_spd(rng, 3));
  const auto s = dimv::fit_standardizer(dimv::from_complete(data));
  const Eigen::VectorXd mean = testsup::sample_mean(data);
  const Eigen::MatrixXd cov = testsup::sample_covariance(data);
  for (Eigen::Index j = 0; j < 3; ++j) {
    CHECK(s.means[j] == doctest::Approx(mean[j]).epsilon(1e-12));
    CHECK(s.scales[j] ==
          doctest::Approx(std::sqrt(cov(j, j))).epsilon(1e-12));
  }
}

TEST_CASE("apply_standardizer rejects width mismatches") {
  const auto s = dimv::Standardizer::identity(3);
  CHECK_THROWS_AS(dimv::apply_standardizer(s, dimv::build_masked({{1.0}})),
                  dimv::DimensionError);
}
