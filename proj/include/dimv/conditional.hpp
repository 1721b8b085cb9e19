#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dimv/dper.hpp"

namespace dimv {

using FeatureSet = std::vector<Eigen::Index>;

// Conditional distribution of the missing block given the observed one:
// mean mu_{m|o} and covariance Sigma_{m|o}.
struct ConditionalGaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Ridge regression view of one imputation: beta = (Sigma_o + alpha I)^-1
// Sigma_of, the contribution of each selected predictor.
struct CoefficientReport {
  Eigen::Index feature = -1;
  FeatureSet predictors;
  Eigen::VectorXd beta;
  double alpha_used = 0.0;
};

// Effect of conditioning on one extra, weakly correlated predictor:
// delta = corr_part * resid_part / gamma.
struct RedundantFeatureReport {
  double delta = 0.0;
  double gamma = 0.0;
  double numerator_corr_part = 0.0;
  double numerator_resid_part = 0.0;
};

// Factorization of one symmetric system A = Sigma_FF + alpha*I. LDLT is the
// fast path; rank-deficiency is detected from the pivots (relative threshold
// 1e-10) with a full-pivot LU double-check, and solves whose LDLT residual
// is poor (possible for indefinite pairwise estimates) rerun through the LU.
class SymSolver {
 public:
  explicit SymSolver(Eigen::MatrixXd a);

  bool singular() const { return singular_; }
  Eigen::Index size() const { return a_.rows(); }

  // Solves A x = b; throws SingularityError when rank-deficient.
  Eigen::MatrixXd solve(const Eigen::Ref<const Eigen::MatrixXd>& b) const;

 private:
  Eigen::MatrixXd a_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
  mutable std::unique_ptr<Eigen::FullPivLU<Eigen::MatrixXd>> lu_;  // lazy
  bool singular_ = false;

  const Eigen::FullPivLU<Eigen::MatrixXd>& lu() const;
};

Eigen::MatrixXd submatrix(const CovarianceMatrix& sigma, const FeatureSet& rows,
                          const FeatureSet& cols);
Eigen::VectorXd subvector_column(const CovarianceMatrix& sigma,
                                 const FeatureSet& rows, Eigen::Index col);

// Conditional mean of feature f for a block of rows: predictions z_obs*beta
// with beta from one linear solve of (Sigma_FF + alpha I) beta = Sigma_Ff.
// z_obs is |rows| x |predictors| of centered observed values.
Eigen::VectorXd conditional_ridge_mean(
    const CovarianceMatrix& sigma, const FeatureSet& predictors,
    Eigen::Index target, const Eigen::Ref<const Eigen::MatrixXd>& z_obs,
    double alpha);

// Sigma_M - Sigma_FM^T (Sigma_FF + alpha I)^-1 Sigma_FM, symmetrized;
// tiny negative diagonal entries (> -1e-9) are clipped to zero.
Eigen::MatrixXd conditional_covariance(const CovarianceMatrix& sigma,
                                       const FeatureSet& predictors,
                                       const FeatureSet& targets, double alpha);

CoefficientReport coefficients(const CovarianceMatrix& sigma,
                               Eigen::Index target,
                               const FeatureSet& predictors, double alpha);

// Closed-form difference between imputing target from core predictors plus
// one extra predictor versus from the core alone (alpha = 0 conditioning).
RedundantFeatureReport redundant_feature_delta(
    const CovarianceMatrix& sigma, Eigen::Index target, const FeatureSet& core,
    Eigen::Index extra, const Eigen::Ref<const Eigen::VectorXd>& x_core,
    double x_extra);

// Cache of SymSolver factorizations and ridge coefficients keyed by
// (predictor set, alpha): blocks of one feature frequently share both.
// Not thread-safe; use one per worker.
class BlockSolver {
 public:
  explicit BlockSolver(const CovarianceMatrix& sigma) : sigma_(&sigma) {}

  const SymSolver& factorization(const FeatureSet& predictors, double alpha);
  const Eigen::VectorXd& coefficients(const FeatureSet& predictors,
                                      Eigen::Index target, double alpha);

 private:
  const CovarianceMatrix* sigma_;
  std::map<std::pair<FeatureSet, double>, std::unique_ptr<SymSolver>> factors_;
  std::map<std::tuple<FeatureSet, Eigen::Index, double>, Eigen::VectorXd>
      betas_;
};

}  // namespace dimv
