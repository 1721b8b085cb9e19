#pragma once

#include <string>

#include "dimv/impute.hpp"

namespace dimv {

// Model persistence: a JSON envelope with base64-encoded little-endian
// 64-bit float arrays, so the metadata stays human-inspectable while the
// numerics round-trip bit-exactly. The covariance and mean live in the
// model's working space (standardized units when config.standardize).
inline constexpr int kModelFormatVersion = 1;

void write_model(const ImputationModel& model, const std::string& path);
ImputationModel read_model(const std::string& path);

}  // namespace dimv
