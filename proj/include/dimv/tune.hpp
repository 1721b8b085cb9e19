#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dimv/impute.hpp"
#include "dimv/masked_matrix.hpp"

namespace dimv {

struct AlphaGrid {
  // Nonnegative, ascending, distinct. Default mirrors the usual search grid.
  std::vector<double> candidates{0.0, 0.01, 0.1, 1.0, 10.0, 100.0};
  std::optional<Eigen::Index> subsample_rows;
  std::uint64_t seed = 0;
};

struct TuneResult {
  double alpha = 0.0;
  std::vector<double> scores;  // per-candidate reconstruction RMSE
};

// Grid search for the ridge parameter: each candidate is scored by the RMSE
// of predicting observed training entries from their rows' other observed
// features (working space), reusing one parameter fit across candidates.
// A singular system at alpha = 0 scores that candidate as +infinity.
// Ties resolve to the smaller alpha.
TuneResult tune_alpha(const MaskedMatrix& train, const ImputationConfig& cfg,
                      const AlphaGrid& grid);

}  // namespace dimv
