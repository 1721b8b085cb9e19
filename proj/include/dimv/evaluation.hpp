#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dimv/impute.hpp"
#include "dimv/masked_matrix.hpp"
#include "dimv/missing_sim.hpp"
#include "dimv/tune.hpp"

namespace dimv {

// RMSE over the flagged positions only (true = evaluate).
double rmse_masked(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& imputed,
                   const BoolMatrix& eval_mask);

// Missing test entries replaced by the training features' available-entry
// means.
Eigen::MatrixXd mean_impute(const MaskedMatrix& train, const MaskedMatrix& test);

// Pairwise complete-case estimate: available-entry means and variances with
// case-deletion covariances, clipped like the direct estimator.
std::pair<MeanVector, CovarianceMatrix> complete_case_cov(const MaskedMatrix& x);

// Imputation model backed by complete-case estimation instead of the direct
// estimator; used for estimator comparisons.
ImputationModel fit_model_complete_case(const MaskedMatrix& train,
                                        const ImputationConfig& cfg);

struct BenchmarkRow {
  std::string method;
  MaskSpec mask;
  double rmse = 0.0;  // NaN when the method failed
  double wall_time_seconds = 0.0;
  std::uint64_t seed = 0;
  ImputationConfig config;
  double tuned_alpha = -1.0;  // >= 0 when tuning ran
  std::string config_digest;
  bool failed = false;
  std::string error;
};

struct BenchmarkReport {
  std::string dataset;
  std::string created_at;
  std::vector<BenchmarkRow> rows;
};

struct BenchmarkOptions {
  std::vector<std::string> methods{"dimv", "mean"};
  ImputationConfig config;
  unsigned workers = 1;
  bool tune = false;  // per-cell alpha grid search, counted in wall time
  AlphaGrid grid;
};

// Corrupts the complete dataset with each mask spec, runs each method, and
// scores RMSE at the deleted positions in original units. Failed cells are
// recorded, not fatal. Deterministic given the specs' seeds.
BenchmarkReport run_benchmark(const Eigen::MatrixXd& dataset,
                              const std::string& dataset_id,
                              const std::vector<MaskSpec>& specs,
                              const BenchmarkOptions& options);

void write_report_json(const BenchmarkReport& report, const std::string& path);
void write_report_csv(const BenchmarkReport& report, const std::string& path);

}  // namespace dimv
