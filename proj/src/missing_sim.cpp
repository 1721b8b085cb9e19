#include "dimv/missing_sim.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "dimv/errors.hpp"
#include "dimv/rng.hpp"

namespace dimv {

BoolMatrix mcar_mask(Eigen::Index n, Eigen::Index p, double rate,
                     std::uint64_t seed) {
  if (!(rate >= 0.0) || !(rate <= 1.0)) {
    throw ValidationError("missing rate must lie in [0, 1]");
  }
  if (n < 0 || p < 0) throw DimensionError("negative matrix dimensions");
  const Eigen::Index total = n * p;
  const auto count = static_cast<Eigen::Index>(
      std::llround(rate * static_cast<double>(total)));
  BoolMatrix missing = BoolMatrix::Constant(n, p, false);
  if (count == 0) return missing;
  if (count > total - p) {
    throw GenerationError(
        "rate " + std::to_string(rate) +
        " cannot leave at least one observation in every column");
  }

  Rng rng(seed);
  std::vector<Eigen::Index> positions(static_cast<std::size_t>(total));
  for (Eigen::Index i = 0; i < total; ++i) {
    positions[static_cast<std::size_t>(i)] = i;
  }
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto j = i + static_cast<Eigen::Index>(
                           rng.bounded(static_cast<std::uint64_t>(total - i)));
    std::swap(positions[static_cast<std::size_t>(i)],
              positions[static_cast<std::size_t>(j)]);
  }
  std::vector<Eigen::Index> observed_per_col(static_cast<std::size_t>(p),
                                             static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < count; ++i) {
    const Eigen::Index pos = positions[static_cast<std::size_t>(i)];
    missing(pos / p, pos % p) = true;
    --observed_per_col[static_cast<std::size_t>(pos % p)];
  }

  // Repair fully missing columns: reveal one seeded position there and hide
  // a seeded observed position from a column that can spare one.
  for (Eigen::Index j = 0; j < p; ++j) {
    if (observed_per_col[static_cast<std::size_t>(j)] > 0) continue;
    const auto reveal_row =
        static_cast<Eigen::Index>(rng.bounded(static_cast<std::uint64_t>(n)));
    std::vector<std::pair<Eigen::Index, Eigen::Index>> donors;
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < p; ++c) {
        if (!missing(r, c) && observed_per_col[static_cast<std::size_t>(c)] > 1) {
          donors.emplace_back(r, c);
        }
      }
    }
    if (donors.empty()) {
      throw GenerationError("column " + std::to_string(j) +
                            " cannot be repaired without emptying another");
    }
    const auto& donor =
        donors[rng.bounded(static_cast<std::uint64_t>(donors.size()))];
    missing(reveal_row, j) = false;
    ++observed_per_col[static_cast<std::size_t>(j)];
    missing(donor.first, donor.second) = true;
    --observed_per_col[static_cast<std::size_t>(donor.second)];
  }
  return missing;
}

BoolMatrix monotone_corner_mask(Eigen::Index n, Eigen::Index image_height,
                                Eigen::Index image_width, double fraction,
                                double affected_share, std::uint64_t seed) {
  if (image_height < 1 || image_width < 1) {
    throw DimensionError("image dimensions must be positive");
  }
  if (!(fraction >= 0.0) || !(fraction <= 1.0)) {
    throw ValidationError("corner fraction must lie in [0, 1]");
  }
  if (!(affected_share >= 0.0) || !(affected_share <= 1.0)) {
    throw ValidationError("affected share must lie in [0, 1]");
  }
  const Eigen::Index p = image_height * image_width;
  BoolMatrix missing = BoolMatrix::Constant(n, p, false);

  const auto affected = static_cast<Eigen::Index>(
      std::llround(affected_share * static_cast<double>(n)));
  Rng rng(seed);
  const auto rows = rng.sample_without_replacement(n, affected);

  const auto cut_h = static_cast<Eigen::Index>(
      std::floor(fraction * static_cast<double>(image_height)));
  const auto cut_w = static_cast<Eigen::Index>(
      std::floor(fraction * static_cast<double>(image_width)));
  for (const Eigen::Index r : rows) {
    for (Eigen::Index py = image_height - cut_h; py < image_height; ++py) {
      for (Eigen::Index px = image_width - cut_w; px < image_width; ++px) {
        missing(r, py * image_width + px) = true;
      }
    }
  }
  return missing;
}

BoolMatrix generate_mask(Eigen::Index n, Eigen::Index p, const MaskSpec& spec) {
  switch (spec.kind) {
    case MaskSpec::Kind::Mcar:
      return mcar_mask(n, p, spec.rate, spec.seed);
    case MaskSpec::Kind::MonotoneCorner:
      if (spec.image_height * spec.image_width != p) {
        throw DimensionError(
            "image dimensions " + std::to_string(spec.image_height) + "x" +
            std::to_string(spec.image_width) + " do not match feature count " +
            std::to_string(p));
      }
      return monotone_corner_mask(n, spec.image_height, spec.image_width,
                                  spec.fraction, spec.affected_share,
                                  spec.seed);
  }
  throw ValidationError("unknown mask kind");
}

MaskedMatrix apply_missing(const Eigen::MatrixXd& complete,
                           const BoolMatrix& missing) {
  if (complete.rows() != missing.rows() || complete.cols() != missing.cols()) {
    throw DimensionError("mask shape does not match the data");
  }
  return MaskedMatrix(complete, !missing);
}

}  // namespace dimv
