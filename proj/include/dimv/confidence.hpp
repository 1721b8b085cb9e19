#pragma once

#include <Eigen/Dense>

#include "dimv/conditional.hpp"
#include "dimv/impute.hpp"

namespace dimv {

// Solid chi-square ellipsoid for a conditional Gaussian: the set of u with
// (u - center)^T shape_inverse (u - center) <= threshold.
struct EllipsoidSpec {
  Eigen::VectorXd center;
  Eigen::MatrixXd shape_inverse;
  double threshold = 0.0;
  double sig_level = 0.0;

  double quadratic_form(const Eigen::Ref<const Eigen::VectorXd>& u) const {
    const Eigen::VectorXd d = u - center;
    return d.dot(shape_inverse * d);
  }
  bool contains(const Eigen::Ref<const Eigen::VectorXd>& u) const {
    return quadratic_form(u) <= threshold;
  }
};

// Region of probability 1 - sig_level for the missing block. Valid for
// unregularized conditioning only; the conditional covariance must be
// invertible.
EllipsoidSpec confidence_region(const ConditionalGaussian& cond,
                                double sig_level);

struct RowConfidenceRegion {
  FeatureSet missing_features;
  ConditionalGaussian conditional;  // original units
  EllipsoidSpec region;             // original units
};

// Conditions a row's missing features on all of its observed ones and wraps
// the chi-square ellipsoid, mapped back to original units. alpha must be 0;
// regularized conditioning has no exact chi-square geometry.
RowConfidenceRegion row_confidence_region(const ImputationModel& model,
                                          const MaskedMatrix& row_matrix,
                                          Eigen::Index row, double sig_level,
                                          double alpha = 0.0);

}  // namespace dimv
