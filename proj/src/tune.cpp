#include "dimv/tune.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "dimv/errors.hpp"
#include "dimv/feature_selection.hpp"
#include "dimv/rng.hpp"

namespace dimv {

namespace {

void validate_grid(const AlphaGrid& grid) {
  if (grid.candidates.empty()) {
    throw ValidationError("alpha grid must not be empty");
  }
  for (std::size_t i = 0; i < grid.candidates.size(); ++i) {
    if (!(grid.candidates[i] >= 0.0)) {
      throw ValidationError("alpha grid values must be >= 0");
    }
    if (i > 0 && !(grid.candidates[i] > grid.candidates[i - 1])) {
      throw ValidationError("alpha grid must be ascending and distinct");
    }
  }
  if (grid.subsample_rows && *grid.subsample_rows < 1) {
    throw ValidationError("subsample row budget must be >= 1");
  }
}

}  // namespace

TuneResult tune_alpha(const MaskedMatrix& train, const ImputationConfig& cfg,
                      const AlphaGrid& grid) {
  validate(cfg);
  validate_grid(grid);
  if (train.cols() < 2) {
    throw TuningError("tuning needs at least two features");
  }

  const ImputationModel model = fit_model(train, cfg);
  const MaskedMatrix working =
      cfg.standardize ? apply_standardizer(model.standardizer, train) : train;

  std::vector<Eigen::Index> rows;
  if (grid.subsample_rows && *grid.subsample_rows < train.rows()) {
    Rng rng(grid.seed);
    rows = rng.sample_without_replacement(train.rows(), *grid.subsample_rows);
  } else {
    rows.resize(static_cast<std::size_t>(train.rows()));
    for (Eigen::Index r = 0; r < train.rows(); ++r) {
      rows[static_cast<std::size_t>(r)] = r;
    }
  }

  // Validation cases grouped by (target, predictor set): each group needs
  // one coefficient solve per candidate.
  struct Group {
    std::vector<Eigen::Index> rows;
  };
  std::map<std::pair<Eigen::Index, FeatureSet>, Group> groups;
  Eigen::Index usable = 0;
  for (Eigen::Index r : rows) {
    FeatureSet observed;
    for (Eigen::Index j = 0; j < working.cols(); ++j) {
      if (working.mask(r, j)) observed.push_back(j);
    }
    if (observed.size() < 2) continue;  // nothing to predict from
    for (Eigen::Index f : observed) {
      FeatureSet others;
      others.reserve(observed.size() - 1);
      for (Eigen::Index j : observed) {
        if (j != f) others.push_back(j);
      }
      FeatureSet predictors =
          select_features(model.sigma, f, others, cfg.tau, cfg.k);
      groups[{f, std::move(predictors)}].rows.push_back(r);
      ++usable;
    }
  }
  if (usable == 0) {
    throw TuningError("no observed entries usable for validation");
  }

  TuneResult result;
  result.scores.assign(grid.candidates.size(),
                       std::numeric_limits<double>::infinity());
  BlockSolver solver(model.sigma);  // cache keyed by (predictors, alpha)
  for (std::size_t c = 0; c < grid.candidates.size(); ++c) {
    const double alpha = grid.candidates[c];
    double sse = 0.0;
    Eigen::Index count = 0;
    bool singular = false;
    for (const auto& [key, group] : groups) {
      const auto& [target, predictors] = key;
      const Eigen::VectorXd* beta = nullptr;
      try {
        beta = &solver.coefficients(predictors, target, alpha);
      } catch (const SingularityError&) {
        singular = true;
        break;
      }
      for (Eigen::Index r : group.rows) {
        double pred = 0.0;
        for (std::size_t i = 0; i < predictors.size(); ++i) {
          pred += working.values(r, predictors[i]) *
                  (*beta)[static_cast<Eigen::Index>(i)];
        }
        const double diff = pred - working.values(r, target);
        sse += diff * diff;
        ++count;
      }
    }
    if (!singular) {
      result.scores[c] = std::sqrt(sse / static_cast<double>(count));
    }
  }

  std::size_t best = 0;
  for (std::size_t c = 1; c < grid.candidates.size(); ++c) {
    if (result.scores[c] < result.scores[best]) best = c;
  }
  if (!std::isfinite(result.scores[best])) {
    throw TuningError("every grid candidate produced a singular system");
  }
  result.alpha = grid.candidates[best];
  return result;
}

}  // namespace dimv
