#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dimv/conditional.hpp"
#include "dimv/dper.hpp"
#include "dimv/masked_matrix.hpp"
#include "dimv/standardizer.hpp"

namespace dimv {

struct ImputationConfig {
  double tau = 0.0;          // correlation threshold, in [0, 1)
  Eigen::Index k = 1;        // top-k fallback when no feature clears tau
  double alpha = 0.0;        // ridge parameter, >= 0
  bool init_with_zero = false;
  bool standardize = true;
};

void validate(const ImputationConfig& cfg);

// Fitted imputation parameters. `mu` and `sigma` live in the working space:
// standardized units when config.standardize, raw units otherwise.
struct ImputationModel {
  Standardizer standardizer;
  MeanVector mu;
  CovarianceMatrix sigma;
  ImputationConfig config;

  Eigen::Index features() const { return sigma.size(); }

  // Estimates mapped back to the original units.
  Eigen::VectorXd mean_original() const;
  Eigen::MatrixXd covariance_original() const;
};

// One imputed block: samples sharing a compatible missing pattern, filled
// with a single linear solve.
struct BlockTrace {
  Eigen::Index feature = -1;
  Eigen::Index seed_row = -1;
  std::vector<Eigen::Index> rows;
  FeatureSet predictors;
};

struct ImputationResult {
  Eigen::MatrixXd imputed;  // original units; observed entries bit-identical
  // One entry per imputed block, in processing order.
  std::vector<CoefficientReport> coefficients;
  // Conditional variance of the block's target feature (working space),
  // aligned with `coefficients`.
  std::vector<double> conditional_variances;
  std::vector<BlockTrace> blocks;  // aligned with `coefficients`
};

// Standardizer (when cfg.standardize) plus direct parameter estimation on
// the standardized training data.
ImputationModel fit_model(const MaskedMatrix& train,
                          const ImputationConfig& cfg);

ImputationResult impute_with_model(const ImputationModel& model,
                                   const MaskedMatrix& test,
                                   const ImputationConfig& cfg);

// fit_model + impute_with_model with a single config.
ImputationResult impute(const MaskedMatrix& train, const MaskedMatrix& test,
                        const ImputationConfig& cfg);

// Joint conditional distribution of a row's missing features given all of
// its observed features (working space), used for confidence regions.
ConditionalGaussian conditional_for_row(const ImputationModel& model,
                                        const MaskedMatrix& row_matrix,
                                        Eigen::Index row, double alpha);

}  // namespace dimv
