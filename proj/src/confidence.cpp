#include "dimv/confidence.hpp"

#include <string>

#include "dimv/chi_square.hpp"
#include "dimv/errors.hpp"

namespace dimv {

EllipsoidSpec confidence_region(const ConditionalGaussian& cond,
                                double sig_level) {
  if (!(sig_level > 0.0) || !(sig_level < 1.0)) {
    throw DomainError("significance level must lie in (0, 1), got " +
                      std::to_string(sig_level));
  }
  const Eigen::Index dim = cond.cov.rows();
  if (dim == 0 || cond.cov.cols() != dim || cond.mean.size() != dim) {
    throw DimensionError("conditional Gaussian has inconsistent dimensions");
  }

  SymSolver solver{Eigen::MatrixXd(cond.cov)};
  if (solver.singular()) {
    throw SingularityError(
        "conditional covariance is singular; exclude collinear predictors "
        "before requesting a confidence region");
  }
  EllipsoidSpec spec;
  spec.center = cond.mean;
  spec.shape_inverse = solver.solve(Eigen::MatrixXd::Identity(dim, dim));
  spec.shape_inverse =
      0.5 * (spec.shape_inverse + spec.shape_inverse.transpose()).eval();
  spec.threshold =
      chi_square_upper_quantile(sig_level, static_cast<double>(dim));
  spec.sig_level = sig_level;
  return spec;
}

RowConfidenceRegion row_confidence_region(const ImputationModel& model,
                                          const MaskedMatrix& row_matrix,
                                          Eigen::Index row, double sig_level,
                                          double alpha) {
  if (alpha != 0.0) {
    throw DomainError(
        "confidence regions are defined for alpha = 0 only; rerun without "
        "regularization");
  }
  RowConfidenceRegion out;
  ConditionalGaussian cond =
      conditional_for_row(model, row_matrix, row, 0.0);
  for (Eigen::Index j = 0; j < row_matrix.cols(); ++j) {
    if (!row_matrix.mask(row, j)) out.missing_features.push_back(j);
  }
  // Map back to original units: center by scale/mean, covariance by the
  // scale outer product.
  const auto dim = static_cast<Eigen::Index>(out.missing_features.size());
  Eigen::VectorXd scales(dim), means(dim);
  for (Eigen::Index t = 0; t < dim; ++t) {
    scales[t] = model.standardizer.scales[out.missing_features[
        static_cast<std::size_t>(t)]];
    means[t] = model.standardizer.means[out.missing_features[
        static_cast<std::size_t>(t)]];
  }
  if (model.config.standardize) {
    out.conditional.mean =
        (cond.mean.array() * scales.array() + means.array()).matrix();
    out.conditional.cov =
        scales.asDiagonal() * cond.cov * scales.asDiagonal();
  } else {
    out.conditional = std::move(cond);
  }
  out.region = confidence_region(out.conditional, sig_level);
  return out;
}

}  // namespace dimv
