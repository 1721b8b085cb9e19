#pragma once

#include "dimv/conditional.hpp"
#include "dimv/dper.hpp"

namespace dimv {

// Pearson correlation implied by the covariance estimate; 0 when either
// feature has zero variance.
double correlation(const CovarianceMatrix& sigma, Eigen::Index i,
                   Eigen::Index j);

// Predictors for target f among the features observed at the seed sample:
// every j with |corr(f, j)| > tau, or, when none qualifies, the k observed
// features with the largest |corr| (ties to the smaller index). Ascending.
FeatureSet select_features(const CovarianceMatrix& sigma, Eigen::Index target,
                           const FeatureSet& observed, double tau,
                           Eigen::Index k);

}  // namespace dimv
