#include "dimv/dper.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dimv/cubic.hpp"
#include "dimv/errors.hpp"
#include "dimv/parallel.hpp"

namespace dimv {

namespace {

constexpr double kBandShrink = 1.0 - 1e-12;

double clip_into_band(double value, double sigma11, double sigma22) {
  const double bound = std::sqrt(sigma11 * sigma22) * kBandShrink;
  return std::clamp(value, -bound, bound);
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXd sigma)
    : sigma_(std::move(sigma)) {
  if (sigma_.rows() != sigma_.cols()) {
    throw DimensionError("covariance matrix must be square");
  }
  for (Eigen::Index i = 0; i < sigma_.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < sigma_.cols(); ++j) {
      if (sigma_(i, j) != sigma_(j, i)) {
        throw ValidationError("covariance matrix not symmetric at (" +
                              std::to_string(i) + ", " + std::to_string(j) +
                              ")");
      }
    }
  }
}

PairStats pair_stats(const MaskedMatrix& centered, Eigen::Index i,
                     Eigen::Index j) {
  PairStats stats;
  for (Eigen::Index r = 0; r < centered.rows(); ++r) {
    const bool oi = centered.mask(r, i);
    const bool oj = centered.mask(r, j);
    if (oi) ++stats.n;
    if (oj) ++stats.l_other;
    if (oi && oj) {
      const double xi = centered.values(r, i);
      const double xj = centered.values(r, j);
      stats.s11 += xi * xi;
      stats.s12 += xi * xj;
      stats.s22 += xj * xj;
      ++stats.m;
    }
  }
  return stats;
}

double eta(double sigma12, const PairStats& stats, double sigma11,
           double sigma22) {
  if (!(sigma11 > 0.0) || !(sigma22 > 0.0)) {
    throw DomainError("eta requires positive variances");
  }
  const double conditional = sigma22 - sigma12 * sigma12 / sigma11;
  if (!(conditional > 0.0)) {
    throw DomainError("eta: nonpositive conditional variance");
  }
  const double ratio = sigma12 / sigma11;
  const double quadratic =
      stats.s22 - 2.0 * ratio * stats.s12 + ratio * ratio * stats.s11;
  return -0.5 * static_cast<double>(stats.m) * std::log(conditional) -
         0.5 * quadratic / conditional;
}

double solve_sigma12(const PairStats& stats, double sigma11, double sigma22,
                     double fallback) {
  if (!(sigma11 > 0.0) || !(sigma22 > 0.0)) {
    throw DomainError("solve_sigma12 requires positive variances");
  }
  if (stats.m == 0) return 0.0;

  const double m = static_cast<double>(stats.m);
  const std::vector<double> roots = cubic_real_roots(
      m, -stats.s12, stats.s22 * sigma11 + stats.s11 * sigma22 - m * sigma11 * sigma22,
      -stats.s12 * sigma11 * sigma22);

  const double band = sigma11 * sigma22;
  std::vector<std::pair<double, double>> admissible;  // (root, eta)
  for (double root : roots) {
    if (!(root * root < band)) continue;
    if (!(sigma22 - root * root / sigma11 > 0.0)) continue;  // fp underflow
    admissible.emplace_back(root, eta(root, stats, sigma11, sigma22));
  }
  if (admissible.empty()) return clip_into_band(fallback, sigma11, sigma22);

  double eta_max = admissible.front().second;
  for (const auto& [root, value] : admissible) eta_max = std::max(eta_max, value);

  // Keep the maximizers (relative tolerance 1e-9), then prefer the one
  // closest to the case-deletion estimate; equidistant picks the smaller.
  const double tol = 1e-9 * std::max(1.0, std::abs(eta_max));
  double best = 0.0;
  bool found = false;
  for (const auto& [root, value] : admissible) {
    if (value < eta_max - tol) continue;
    if (!found || std::abs(root - fallback) < std::abs(best - fallback) ||
        (std::abs(root - fallback) == std::abs(best - fallback) &&
         root < best)) {
      best = root;
      found = true;
    }
  }
  return best;
}

double case_deletion_cov(const MaskedMatrix& centered, Eigen::Index i,
                         Eigen::Index j) {
  double sum_i = 0.0, sum_j = 0.0, cross = 0.0;
  Eigen::Index m = 0;
  for (Eigen::Index r = 0; r < centered.rows(); ++r) {
    if (centered.mask(r, i) && centered.mask(r, j)) {
      const double xi = centered.values(r, i);
      const double xj = centered.values(r, j);
      sum_i += xi;
      sum_j += xj;
      cross += xi * xj;
      ++m;
    }
  }
  if (m < 2) return 0.0;
  const double dm = static_cast<double>(m);
  return cross / dm - (sum_i / dm) * (sum_j / dm);
}

std::pair<MeanVector, CovarianceMatrix> dper_fit(const MaskedMatrix& x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();

  Eigen::VectorXd mu = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd obs_count = Eigen::VectorXd::Zero(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double sum = 0.0;
    Eigen::Index count = 0;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (x.mask(r, j)) {
        sum += x.values(r, j);
        ++count;
      }
    }
    if (count == 0) {
      throw EstimationError("feature " + std::to_string(j) +
                            " has no observed entries");
    }
    mu[j] = sum / static_cast<double>(count);
    obs_count[j] = static_cast<double>(count);
  }

  // Centered values with missing entries zeroed; pairwise sums then reduce
  // to three Gram products over the column space.
  Eigen::MatrixXd observed = x.mask.cast<double>().matrix();
  Eigen::MatrixXd centered =
      (x.values.rowwise() - mu.transpose()).cwiseProduct(observed);

  const Eigen::MatrixXd cross = centered.transpose() * centered;
  const Eigen::MatrixXd sq_sums =
      centered.cwiseProduct(centered).transpose() * observed;
  const Eigen::MatrixXd lin_sums = centered.transpose() * observed;
  const Eigen::MatrixXd co_counts = observed.transpose() * observed;

  CovarianceMatrix sigma(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    sigma.set_diagonal(j, sq_sums(j, j) / obs_count[j]);
  }

  // Off-diagonal entries are independent given the diagonal; solve the
  // p(p-1)/2 cubics in parallel (disjoint output slots).
  const std::size_t n_pairs = static_cast<std::size_t>(p) *
                              static_cast<std::size_t>(p - 1) / 2;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  pairs.reserve(n_pairs);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) pairs.emplace_back(i, j);
  }
  std::vector<double> off(n_pairs, 0.0);

  parallel_for_index(n_pairs, [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    const double sii = sigma(i, i);
    const double sjj = sigma(j, j);
    if (sii == 0.0 || sjj == 0.0) return;  // constant feature

    PairStats stats;
    stats.s11 = sq_sums(i, j);
    stats.s12 = cross(i, j);
    stats.s22 = sq_sums(j, i);
    stats.m = static_cast<Eigen::Index>(std::llround(co_counts(i, j)));
    stats.n = static_cast<Eigen::Index>(std::llround(obs_count[i]));
    stats.l_other = static_cast<Eigen::Index>(std::llround(obs_count[j]));

    double fallback = 0.0;
    if (stats.m >= 2) {
      const double dm = static_cast<double>(stats.m);
      fallback = cross(i, j) / dm - (lin_sums(i, j) / dm) * (lin_sums(j, i) / dm);
    }

    double value = solve_sigma12(stats, sii, sjj, fallback);
    const double bound = std::sqrt(sii * sjj);
    if (std::abs(value) > bound) {
      value = std::copysign(bound * kBandShrink, value);
    }
    off[k] = value;
  });

  for (std::size_t k = 0; k < n_pairs; ++k) {
    sigma.set_pair(pairs[k].first, pairs[k].second, off[k]);
  }
  return {MeanVector{std::move(mu)}, std::move(sigma)};
}

}  // namespace dimv
