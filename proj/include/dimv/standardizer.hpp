#pragma once

#include <Eigen/Dense>

#include "dimv/masked_matrix.hpp"

namespace dimv {

// Per-feature centering/scaling transform fit on the available entries only.
// Scales are uncorrected standard deviations, replaced by 1.0 for constant
// or single-observation columns so apply() never divides by zero.
struct Standardizer {
  Eigen::VectorXd means;
  Eigen::VectorXd scales;

  Eigen::Index size() const { return means.size(); }

  static Standardizer identity(Eigen::Index p) {
    return Standardizer{Eigen::VectorXd::Zero(p), Eigen::VectorXd::Ones(p)};
  }
};

Standardizer fit_standardizer(const MaskedMatrix& x);

// (v - mean) / scale on every entry; the mask is unchanged.
MaskedMatrix apply_standardizer(const Standardizer& s, const MaskedMatrix& x);

// v * scale + mean; inverse of apply_standardizer.
MaskedMatrix invert_standardizer(const Standardizer& s, const MaskedMatrix& x);

}  // namespace dimv
