#include "dimv/standardizer.hpp"

#include <cmath>
#include <string>

#include "dimv/errors.hpp"

namespace dimv {

Standardizer fit_standardizer(const MaskedMatrix& x) {
  const Eigen::Index p = x.cols();
  Eigen::VectorXd means = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd scales = Eigen::VectorXd::Ones(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double sum = 0.0;
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (x.mask(i, j)) {
        sum += x.values(i, j);
        ++count;
      }
    }
    if (count == 0) {
      throw EstimationError("feature " + std::to_string(j) +
                            " has no observed entries");
    }
    const double mean = sum / static_cast<double>(count);
    means[j] = mean;
    if (count == 1) continue;  // scale stays 1.0
    double ss = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (x.mask(i, j)) {
        const double d = x.values(i, j) - mean;
        ss += d * d;
      }
    }
    const double variance = ss / static_cast<double>(count);
    scales[j] = variance > 0.0 ? std::sqrt(variance) : 1.0;
  }
  return Standardizer{std::move(means), std::move(scales)};
}

namespace {

void check_width(const Standardizer& s, const MaskedMatrix& x) {
  if (s.size() != x.cols()) {
    throw DimensionError("standardizer width " + std::to_string(s.size()) +
                         " vs matrix width " + std::to_string(x.cols()));
  }
}

}  // namespace

MaskedMatrix apply_standardizer(const Standardizer& s, const MaskedMatrix& x) {
  check_width(s, x);
  Eigen::MatrixXd values =
      (x.values.rowwise() - s.means.transpose()).array().rowwise() /
      s.scales.transpose().array();
  return MaskedMatrix(std::move(values), x.mask);
}

MaskedMatrix invert_standardizer(const Standardizer& s, const MaskedMatrix& x) {
  check_width(s, x);
  Eigen::MatrixXd values =
      (x.values.array().rowwise() * s.scales.transpose().array()).matrix();
  values.rowwise() += s.means.transpose();
  return MaskedMatrix(std::move(values), x.mask);
}

}  // namespace dimv
