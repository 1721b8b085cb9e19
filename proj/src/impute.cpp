#include "dimv/impute.hpp"

#include <deque>
#include <string>

#include "dimv/errors.hpp"
#include "dimv/feature_selection.hpp"

namespace dimv {

void validate(const ImputationConfig& cfg) {
  if (!(cfg.tau >= 0.0) || !(cfg.tau < 1.0)) {
    throw ValidationError("tau must lie in [0, 1)");
  }
  if (cfg.k < 1) throw ValidationError("k must be >= 1");
  if (!(cfg.alpha >= 0.0)) throw ValidationError("alpha must be >= 0");
}

Eigen::VectorXd ImputationModel::mean_original() const {
  return standardizer.means.array() +
         standardizer.scales.array() * mu.mu.array();
}

Eigen::MatrixXd ImputationModel::covariance_original() const {
  const Eigen::VectorXd& s = standardizer.scales;
  return s.asDiagonal() * sigma.matrix() * s.asDiagonal();
}

ImputationModel fit_model(const MaskedMatrix& train,
                          const ImputationConfig& cfg) {
  validate(cfg);
  Standardizer std_ = cfg.standardize ? fit_standardizer(train)
                                      : Standardizer::identity(train.cols());
  const MaskedMatrix working =
      cfg.standardize ? apply_standardizer(std_, train) : train;
  auto [mu, sigma] = dper_fit(working);
  return ImputationModel{std::move(std_), std::move(mu), std::move(sigma), cfg};
}

namespace {

// Missing-feature block membership for the pattern-stacking path: the
// candidate's missing set must be contained in the seed's, and every
// selected predictor must be observed at the candidate.
bool block_member(const BoolMatrix& mask, Eigen::Index candidate,
                  Eigen::Index seed, const FeatureSet& predictors) {
  for (Eigen::Index j = 0; j < mask.cols(); ++j) {
    if (!mask(candidate, j) && mask(seed, j)) return false;  // M_i ⊆ M_s
  }
  for (Eigen::Index j : predictors) {
    if (!mask(candidate, j)) return false;  // F ⊆ A_i
  }
  return true;
}

// sigma_ff - Sigma_Ff^T beta; the ridge term is already inside beta.
double block_conditional_variance(const CovarianceMatrix& sigma,
                                  const FeatureSet& predictors,
                                  Eigen::Index target,
                                  const Eigen::VectorXd& beta) {
  double value = sigma(target, target);
  for (std::size_t i = 0; i < predictors.size(); ++i) {
    value -= sigma(predictors[i], target) * beta[static_cast<Eigen::Index>(i)];
  }
  if (value < 0.0 && value > -1e-9) value = 0.0;
  return value;
}

}  // namespace

ImputationResult impute_with_model(const ImputationModel& model,
                                   const MaskedMatrix& test,
                                   const ImputationConfig& cfg) {
  validate(cfg);
  const Eigen::Index p = test.cols();
  const Eigen::Index n = test.rows();
  if (p != model.features()) {
    throw DimensionError("test has " + std::to_string(p) +
                         " features, model expects " +
                         std::to_string(model.features()));
  }

  // The model defines the working space; cfg.standardize is only consulted
  // at fit time.
  const bool standardized = model.config.standardize;
  const MaskedMatrix working =
      standardized ? apply_standardizer(model.standardizer, test) : test;

  // Working-space values with missing entries zeroed; predictions are read
  // from this matrix, never from previously imputed features.
  Eigen::MatrixXd source = working.values.cwiseProduct(
      working.mask.cast<double>().matrix());
  Eigen::MatrixXd filled = source;  // missing entries default to the mean (0)

  ImputationResult result;
  result.imputed = test.values;
  BlockSolver solver(model.sigma);

  auto impute_block = [&](Eigen::Index f, const FeatureSet& predictors,
                          const std::vector<Eigen::Index>& rows) {
    Eigen::MatrixXd z(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(predictors.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < predictors.size(); ++c) {
        z(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            source(rows[r], predictors[c]);
      }
    }
    const Eigen::VectorXd* beta = nullptr;
    try {
      beta = &solver.coefficients(predictors, f, cfg.alpha);
    } catch (const SingularityError& e) {
      throw SingularityError("feature " + std::to_string(f) + ", block of " +
                             std::to_string(rows.size()) +
                             " samples seeded at row " +
                             std::to_string(rows.front()) + ": " + e.what());
    }
    const Eigen::VectorXd predictions = z * (*beta);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      filled(rows[r], f) = predictions[static_cast<Eigen::Index>(r)];
    }
    CoefficientReport report;
    report.feature = f;
    report.predictors = predictors;
    report.beta = *beta;
    report.alpha_used = cfg.alpha;
    result.coefficients.push_back(std::move(report));
    result.conditional_variances.push_back(
        block_conditional_variance(model.sigma, predictors, f, *beta));
    result.blocks.push_back(BlockTrace{f, rows.front(), rows, predictors});
  };

  std::vector<Eigen::Index> features_with_missing;
  for (Eigen::Index f = 0; f < p; ++f) {
    for (Eigen::Index r = 0; r < n; ++r) {
      if (!test.mask(r, f)) {
        features_with_missing.push_back(f);
        break;
      }
    }
  }

  if (cfg.init_with_zero) {
    // Zero-initialized path: one block per feature, every other feature
    // counts as observed with the zero fill standing in for missing values.
    FeatureSet all_others;
    all_others.reserve(static_cast<std::size_t>(p) - 1);
    for (Eigen::Index f : features_with_missing) {
      std::vector<Eigen::Index> rows;
      for (Eigen::Index r = 0; r < n; ++r) {
        if (!test.mask(r, f)) rows.push_back(r);
      }
      if (p == 1) continue;  // no predictors exist; keep the mean fill
      all_others.clear();
      for (Eigen::Index j = 0; j < p; ++j) {
        if (j != f) all_others.push_back(j);
      }
      const FeatureSet predictors =
          select_features(model.sigma, f, all_others, cfg.tau, cfg.k);
      impute_block(f, predictors, rows);
    }
  } else {
    for (Eigen::Index f : features_with_missing) {
      std::deque<Eigen::Index> pending;
      for (Eigen::Index r = 0; r < n; ++r) {
        if (!test.mask(r, f)) pending.push_back(r);
      }
      while (!pending.empty()) {
        const Eigen::Index seed = pending.front();
        FeatureSet observed;
        for (Eigen::Index j = 0; j < p; ++j) {
          if (test.mask(seed, j)) observed.push_back(j);
        }
        if (observed.empty()) {
          // Nothing to condition on: keep the mean fill.
          pending.pop_front();
          continue;
        }
        const FeatureSet predictors =
            select_features(model.sigma, f, observed, cfg.tau, cfg.k);
        std::vector<Eigen::Index> rows;
        std::deque<Eigen::Index> remaining;
        for (Eigen::Index r : pending) {
          if (block_member(test.mask, r, seed, predictors)) {
            rows.push_back(r);
          } else {
            remaining.push_back(r);
          }
        }
        impute_block(f, predictors, rows);
        pending.swap(remaining);
      }
    }
  }

  // Map imputed entries back to the original units; observed entries were
  // copied from the input and stay untouched.
  for (Eigen::Index f = 0; f < p; ++f) {
    const double scale = model.standardizer.scales[f];
    const double mean = model.standardizer.means[f];
    for (Eigen::Index r = 0; r < n; ++r) {
      if (!test.mask(r, f)) {
        result.imputed(r, f) =
            standardized ? filled(r, f) * scale + mean : filled(r, f);
      }
    }
  }
  return result;
}

ImputationResult impute(const MaskedMatrix& train, const MaskedMatrix& test,
                        const ImputationConfig& cfg) {
  if (train.cols() != test.cols()) {
    throw DimensionError("train has " + std::to_string(train.cols()) +
                         " features, test has " + std::to_string(test.cols()));
  }
  return impute_with_model(fit_model(train, cfg), test, cfg);
}

ConditionalGaussian conditional_for_row(const ImputationModel& model,
                                        const MaskedMatrix& row_matrix,
                                        Eigen::Index row, double alpha) {
  if (row < 0 || row >= row_matrix.rows()) {
    throw IndexError("row " + std::to_string(row) + " out of range");
  }
  if (row_matrix.cols() != model.features()) {
    throw DimensionError("row width does not match the model");
  }
  const MaskedMatrix working =
      model.config.standardize
          ? apply_standardizer(model.standardizer, row_matrix)
          : row_matrix;

  FeatureSet observed, missing;
  for (Eigen::Index j = 0; j < working.cols(); ++j) {
    (working.mask(row, j) ? observed : missing).push_back(j);
  }
  if (missing.empty()) {
    throw ValidationError("row has no missing entries to condition on");
  }
  Eigen::VectorXd u_obs(static_cast<Eigen::Index>(observed.size()));
  for (std::size_t i = 0; i < observed.size(); ++i) {
    u_obs[static_cast<Eigen::Index>(i)] = working.values(row, observed[i]);
  }

  ConditionalGaussian cond;
  cond.cov = conditional_covariance(model.sigma, observed, missing, alpha);
  if (observed.empty()) {
    cond.mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(missing.size()));
  } else {
    const SymSolver solver(
        [&] {
          Eigen::MatrixXd a = submatrix(model.sigma, observed, observed);
          a.diagonal().array() += alpha;
          return a;
        }());
    const Eigen::MatrixXd cross = submatrix(model.sigma, observed, missing);
    cond.mean = cross.transpose() * solver.solve(u_obs);
  }
  return cond;
}

}  // namespace dimv
