#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace dimv {

using BoolArray = Eigen::Array<bool, Eigen::Dynamic, 1>;
using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Dense real matrix with an explicit observation mask. Rows are samples,
// columns are features; mask(i, j) == true means values(i, j) is observed.
// Entries under the mask are meaningless and never read.
struct MaskedMatrix {
  Eigen::MatrixXd values;
  BoolMatrix mask;

  MaskedMatrix() = default;
  // Validates matching shapes and that every observed entry is finite.
  MaskedMatrix(Eigen::MatrixXd values, BoolMatrix mask);

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  bool observed(Eigen::Index i, Eigen::Index j) const { return mask(i, j); }
  bool complete() const { return mask.all(); }
  Eigen::Index missing_count() const {
    return mask.size() - mask.cast<Eigen::Index>().sum();
  }
};

// Per-sample missingness: bits[j] == true means feature j is missing.
struct MissingPattern {
  BoolArray bits;

  bool operator==(const MissingPattern& other) const {
    return bits.size() == other.bits.size() && (bits == other.bits).all();
  }
};

// A complete matrix viewed as fully observed.
MaskedMatrix from_complete(Eigen::MatrixXd values);

// Builds a MaskedMatrix from rows of optional values; p gives the expected
// feature count (required so an empty row list is unambiguous).
MaskedMatrix build_masked(
    const std::vector<std::vector<std::optional<double>>>& rows,
    Eigen::Index p);

// Variant deducing p from the first row; errors on an empty list.
MaskedMatrix build_masked(
    const std::vector<std::vector<std::optional<double>>>& rows);

MissingPattern pattern_of(const MaskedMatrix& x, Eigen::Index row);

}  // namespace dimv
