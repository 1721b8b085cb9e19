#include "dimv/masked_matrix.hpp"

#include <cmath>
#include <string>

#include "dimv/errors.hpp"

namespace dimv {

MaskedMatrix::MaskedMatrix(Eigen::MatrixXd values_in, BoolMatrix mask_in)
    : values(std::move(values_in)), mask(std::move(mask_in)) {
  if (values.rows() != mask.rows() || values.cols() != mask.cols()) {
    throw DimensionError("masked matrix: values " +
                         std::to_string(values.rows()) + "x" +
                         std::to_string(values.cols()) + " vs mask " +
                         std::to_string(mask.rows()) + "x" +
                         std::to_string(mask.cols()));
  }
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (mask(i, j) && !std::isfinite(values(i, j))) {
        throw ValidationError("non-finite observed value at row " +
                              std::to_string(i) + ", column " +
                              std::to_string(j));
      }
    }
  }
}

MaskedMatrix from_complete(Eigen::MatrixXd values) {
  BoolMatrix mask = BoolMatrix::Constant(values.rows(), values.cols(), true);
  return MaskedMatrix(std::move(values), std::move(mask));
}

MaskedMatrix build_masked(
    const std::vector<std::vector<std::optional<double>>>& rows,
    Eigen::Index p) {
  if (p < 1) throw DimensionError("feature count must be >= 1");
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n, p);
  BoolMatrix mask = BoolMatrix::Constant(n, p, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != p) {
      throw DimensionError("row " + std::to_string(i) + " has " +
                           std::to_string(row.size()) + " entries, expected " +
                           std::to_string(p));
    }
    for (Eigen::Index j = 0; j < p; ++j) {
      const auto& cell = row[static_cast<std::size_t>(j)];
      if (cell.has_value()) {
        values(i, j) = *cell;
        mask(i, j) = true;
      }
    }
  }
  return MaskedMatrix(std::move(values), std::move(mask));
}

MaskedMatrix build_masked(
    const std::vector<std::vector<std::optional<double>>>& rows) {
  if (rows.empty()) {
    throw DimensionError(
        "cannot deduce feature count from an empty row list; pass p");
  }
  return build_masked(rows, static_cast<Eigen::Index>(rows.front().size()));
}

MissingPattern pattern_of(const MaskedMatrix& x, Eigen::Index row) {
  if (row < 0 || row >= x.rows()) {
    throw IndexError("row " + std::to_string(row) + " out of range [0, " +
                     std::to_string(x.rows()) + ")");
  }
  return MissingPattern{!x.mask.row(row).transpose()};
}

}  // namespace dimv
