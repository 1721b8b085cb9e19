#pragma once

#include <cstdint>

#include "dimv/masked_matrix.hpp"

namespace dimv {

// Description of a synthetic missingness pattern. For the monotone corner
// kind, image_height * image_width must equal the feature count and
// `fraction` gives the deleted corner's side fraction.
struct MaskSpec {
  enum class Kind { Mcar, MonotoneCorner };

  Kind kind = Kind::Mcar;
  double rate = 0.0;            // MCAR share of deleted entries
  double fraction = 0.0;        // corner side fraction
  Eigen::Index image_height = 0;
  Eigen::Index image_width = 0;
  double affected_share = 0.5;  // share of corrupted samples (monotone)
  std::uint64_t seed = 0;
};

// Missingness masks: true marks a missing entry.

// Exactly round(rate * n * p) missing entries, seeded shuffle placement,
// then a repair pass that guarantees at least one observation per column.
BoolMatrix mcar_mask(Eigen::Index n, Eigen::Index p, double rate,
                     std::uint64_t seed);

// Deletes the bottom-right floor(r*h) x floor(r*w) pixel block in a seeded
// sample of round(affected_share * n) rows; features are row-major pixels.
BoolMatrix monotone_corner_mask(Eigen::Index n, Eigen::Index image_height,
                                Eigen::Index image_width, double fraction,
                                double affected_share, std::uint64_t seed);

BoolMatrix generate_mask(Eigen::Index n, Eigen::Index p, const MaskSpec& spec);

// Hides the masked entries of a complete matrix.
MaskedMatrix apply_missing(const Eigen::MatrixXd& complete,
                           const BoolMatrix& missing);

}  // namespace dimv
