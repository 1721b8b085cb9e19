#include "dimv/conditional.hpp"

#include <cmath>
#include <string>

#include "dimv/errors.hpp"

namespace dimv {

namespace {

constexpr double kPivotThreshold = 1e-10;
constexpr double kResidualThreshold = 1e-8;

void check_feature(const CovarianceMatrix& sigma, Eigen::Index f,
                   const char* what) {
  if (f < 0 || f >= sigma.size()) {
    throw IndexError(std::string(what) + " index " + std::to_string(f) +
                     " out of range [0, " + std::to_string(sigma.size()) + ")");
  }
}

}  // namespace

SymSolver::SymSolver(Eigen::MatrixXd a) : a_(std::move(a)), ldlt_(a_) {
  if (a_.rows() != a_.cols()) {
    throw DimensionError("symmetric solver needs a square matrix");
  }
  if (a_.rows() == 0) return;
  const Eigen::VectorXd d = ldlt_.vectorD().cwiseAbs();
  const double d_max = d.maxCoeff();
  if (d_max == 0.0 || d.minCoeff() <= kPivotThreshold * d_max) {
    // Pivots from an indefinite matrix can be misleading; let a
    // rank-revealing LU make the final call.
    singular_ = !lu().isInvertible();
  }
}

const Eigen::FullPivLU<Eigen::MatrixXd>& SymSolver::lu() const {
  if (!lu_) {
    lu_ = std::make_unique<Eigen::FullPivLU<Eigen::MatrixXd>>(a_);
    lu_->setThreshold(kPivotThreshold);
  }
  return *lu_;
}

Eigen::MatrixXd SymSolver::solve(
    const Eigen::Ref<const Eigen::MatrixXd>& b) const {
  if (singular_) {
    throw SingularityError(
        "covariance block is numerically singular; use alpha > 0 to "
        "regularize");
  }
  if (b.size() == 0) return Eigen::MatrixXd(a_.rows(), b.cols());
  Eigen::MatrixXd x =
      lu_ ? Eigen::MatrixXd(lu_->solve(b)) : Eigen::MatrixXd(ldlt_.solve(b));
  const double scale = a_.cwiseAbs().maxCoeff() * x.cwiseAbs().maxCoeff() +
                       b.cwiseAbs().maxCoeff();
  const double residual = (a_ * x - b).cwiseAbs().maxCoeff();
  if (!(residual <= kResidualThreshold * std::max(scale, 1e-300))) {
    x = lu().solve(b);
    const double retry = (a_ * x - b).cwiseAbs().maxCoeff();
    if (!(retry <= kResidualThreshold * std::max(scale, 1e-300)) ||
        !x.allFinite()) {
      throw SingularityError(
          "covariance block is numerically singular; use alpha > 0 to "
          "regularize");
    }
  }
  return x;
}

Eigen::MatrixXd submatrix(const CovarianceMatrix& sigma, const FeatureSet& rows,
                          const FeatureSet& cols) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    check_feature(sigma, rows[i], "feature");
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          sigma(rows[i], cols[j]);
    }
  }
  for (std::size_t j = 0; j < cols.size(); ++j) {
    check_feature(sigma, cols[j], "feature");
  }
  return out;
}

Eigen::VectorXd subvector_column(const CovarianceMatrix& sigma,
                                 const FeatureSet& rows, Eigen::Index col) {
  check_feature(sigma, col, "feature");
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    check_feature(sigma, rows[i], "feature");
    out[static_cast<Eigen::Index>(i)] = sigma(rows[i], col);
  }
  return out;
}

namespace {

Eigen::MatrixXd ridge_system(const CovarianceMatrix& sigma,
                             const FeatureSet& predictors, double alpha) {
  if (alpha < 0.0) throw ValidationError("alpha must be nonnegative");
  Eigen::MatrixXd a = submatrix(sigma, predictors, predictors);
  a.diagonal().array() += alpha;
  return a;
}

}  // namespace

Eigen::VectorXd conditional_ridge_mean(
    const CovarianceMatrix& sigma, const FeatureSet& predictors,
    Eigen::Index target, const Eigen::Ref<const Eigen::MatrixXd>& z_obs,
    double alpha) {
  if (z_obs.cols() != static_cast<Eigen::Index>(predictors.size())) {
    throw DimensionError("observed block has " + std::to_string(z_obs.cols()) +
                         " columns, expected " +
                         std::to_string(predictors.size()));
  }
  const SymSolver solver(ridge_system(sigma, predictors, alpha));
  const Eigen::VectorXd beta =
      solver.solve(subvector_column(sigma, predictors, target));
  return z_obs * beta;
}

Eigen::MatrixXd conditional_covariance(const CovarianceMatrix& sigma,
                                       const FeatureSet& predictors,
                                       const FeatureSet& targets,
                                       double alpha) {
  const SymSolver solver(ridge_system(sigma, predictors, alpha));
  const Eigen::MatrixXd cross = submatrix(sigma, predictors, targets);
  Eigen::MatrixXd cov =
      submatrix(sigma, targets, targets) - cross.transpose() * solver.solve(cross);
  cov = 0.5 * (cov + cov.transpose()).eval();
  for (Eigen::Index i = 0; i < cov.rows(); ++i) {
    if (cov(i, i) < 0.0 && cov(i, i) > -1e-9) cov(i, i) = 0.0;
  }
  return cov;
}

CoefficientReport coefficients(const CovarianceMatrix& sigma,
                               Eigen::Index target,
                               const FeatureSet& predictors, double alpha) {
  check_feature(sigma, target, "target");
  const SymSolver solver(ridge_system(sigma, predictors, alpha));
  CoefficientReport report;
  report.feature = target;
  report.predictors = predictors;
  report.beta = solver.solve(subvector_column(sigma, predictors, target));
  report.alpha_used = alpha;
  return report;
}

RedundantFeatureReport redundant_feature_delta(
    const CovarianceMatrix& sigma, Eigen::Index target, const FeatureSet& core,
    Eigen::Index extra, const Eigen::Ref<const Eigen::VectorXd>& x_core,
    double x_extra) {
  check_feature(sigma, target, "target");
  check_feature(sigma, extra, "extra predictor");
  if (x_core.size() != static_cast<Eigen::Index>(core.size())) {
    throw DimensionError("core predictor values length mismatch");
  }

  const SymSolver solver(ridge_system(sigma, core, 0.0));
  const Eigen::VectorXd sigma_core_extra = subvector_column(sigma, core, extra);
  const Eigen::VectorXd sigma_core_target =
      subvector_column(sigma, core, target);
  const Eigen::VectorXd solved_extra = solver.solve(sigma_core_extra);

  RedundantFeatureReport report;
  report.gamma = sigma(extra, extra) - sigma_core_extra.dot(solved_extra);
  if (std::abs(report.gamma) <= 1e-12) {
    throw DomainError(
        "degenerate conditioning: the extra predictor is explained by the "
        "core set (|gamma| <= 1e-12)");
  }
  report.numerator_corr_part =
      sigma_core_target.dot(solved_extra) - sigma(target, extra);
  report.numerator_resid_part = solved_extra.dot(x_core) - x_extra;
  report.delta =
      report.numerator_corr_part * report.numerator_resid_part / report.gamma;
  return report;
}

const SymSolver& BlockSolver::factorization(const FeatureSet& predictors,
                                            double alpha) {
  const auto key = std::make_pair(predictors, alpha);
  auto it = factors_.find(key);
  if (it == factors_.end()) {
    it = factors_
             .emplace(key, std::make_unique<SymSolver>(
                               ridge_system(*sigma_, predictors, alpha)))
             .first;
  }
  return *it->second;
}

const Eigen::VectorXd& BlockSolver::coefficients(const FeatureSet& predictors,
                                                 Eigen::Index target,
                                                 double alpha) {
  const auto key = std::make_tuple(predictors, target, alpha);
  auto it = betas_.find(key);
  if (it == betas_.end()) {
    const SymSolver& solver = factorization(predictors, alpha);
    it = betas_
             .emplace(key,
                      solver.solve(subvector_column(*sigma_, predictors, target)))
             .first;
  }
  return it->second;
}

}  // namespace dimv
