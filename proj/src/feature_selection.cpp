#include "dimv/feature_selection.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dimv/errors.hpp"

namespace dimv {

double correlation(const CovarianceMatrix& sigma, Eigen::Index i,
                   Eigen::Index j) {
  const double vi = sigma(i, i);
  const double vj = sigma(j, j);
  if (vi == 0.0 || vj == 0.0) return 0.0;
  return sigma(i, j) / std::sqrt(vi * vj);
}

FeatureSet select_features(const CovarianceMatrix& sigma, Eigen::Index target,
                           const FeatureSet& observed, double tau,
                           Eigen::Index k) {
  if (observed.empty()) {
    throw SelectionError("feature " + std::to_string(target) +
                         ": no observed features to select from");
  }
  if (!(tau >= 0.0) || !(tau < 1.0)) {
    throw ValidationError("tau must lie in [0, 1)");
  }
  if (k < 1) throw ValidationError("k must be >= 1");

  FeatureSet selected;
  for (Eigen::Index j : observed) {
    if (j == target) continue;
    if (std::abs(correlation(sigma, target, j)) > tau) selected.push_back(j);
  }
  if (!selected.empty()) {
    std::sort(selected.begin(), selected.end());
    return selected;
  }

  // Fallback: top-k by |correlation|, larger first, then smaller index.
  FeatureSet pool;
  for (Eigen::Index j : observed) {
    if (j != target) pool.push_back(j);
  }
  if (pool.empty()) {
    throw SelectionError("feature " + std::to_string(target) +
                         ": observed set contains only the target");
  }
  std::sort(pool.begin(), pool.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double ca = std::abs(correlation(sigma, target, a));
    const double cb = std::abs(correlation(sigma, target, b));
    if (ca != cb) return ca > cb;
    return a < b;
  });
  pool.resize(static_cast<std::size_t>(
      std::min<Eigen::Index>(k, static_cast<Eigen::Index>(pool.size()))));
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace dimv
