#include "dimv/model_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "dimv/errors.hpp"

namespace dimv {

namespace {

constexpr char kBase64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::uint8_t* data, std::size_t size) {
  std::string out;
  out.reserve((size + 2) / 3 * 4);
  for (std::size_t i = 0; i < size; i += 3) {
    std::uint32_t chunk = static_cast<std::uint32_t>(data[i]) << 16;
    if (i + 1 < size) chunk |= static_cast<std::uint32_t>(data[i + 1]) << 8;
    if (i + 2 < size) chunk |= static_cast<std::uint32_t>(data[i + 2]);
    out.push_back(kBase64Alphabet[(chunk >> 18) & 0x3f]);
    out.push_back(kBase64Alphabet[(chunk >> 12) & 0x3f]);
    out.push_back(i + 1 < size ? kBase64Alphabet[(chunk >> 6) & 0x3f] : '=');
    out.push_back(i + 2 < size ? kBase64Alphabet[chunk & 0x3f] : '=');
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  std::vector<int> lookup(256, -1);
  for (int i = 0; i < 64; ++i) {
    lookup[static_cast<unsigned char>(kBase64Alphabet[i])] = i;
  }
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  std::uint32_t chunk = 0;
  int bits = 0;
  for (char c : text) {
    if (c == '=') break;
    const int value = lookup[static_cast<unsigned char>(c)];
    if (value < 0) throw ValidationError("invalid base64 payload");
    chunk = (chunk << 6) | static_cast<std::uint32_t>(value);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((chunk >> bits) & 0xff));
    }
  }
  return out;
}

std::string encode_doubles(const double* values, Eigen::Index count) {
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(count) * 8);
  for (Eigen::Index i = 0; i < count; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &values[i], 8);
    for (int b = 0; b < 8; ++b) {
      bytes[static_cast<std::size_t>(i) * 8 + static_cast<std::size_t>(b)] =
          static_cast<std::uint8_t>(bits >> (8 * b));  // little-endian
    }
  }
  return base64_encode(bytes.data(), bytes.size());
}

std::vector<double> decode_doubles(const std::string& text,
                                   Eigen::Index expected) {
  const auto bytes = base64_decode(text);
  if (bytes.size() != static_cast<std::size_t>(expected) * 8) {
    throw ValidationError("binary array has wrong length");
  }
  std::vector<double> values(static_cast<std::size_t>(expected));
  for (Eigen::Index i = 0; i < expected; ++i) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) {
      bits = (bits << 8) |
             bytes[static_cast<std::size_t>(i) * 8 + static_cast<std::size_t>(b)];
    }
    std::memcpy(&values[static_cast<std::size_t>(i)], &bits, 8);
  }
  return values;
}

}  // namespace

void write_model(const ImputationModel& model, const std::string& path) {
  const Eigen::Index p = model.features();
  // Row-major emission; the matrix is symmetric so the order only matters
  // for byte-level reproducibility.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      cov_rm = model.sigma.matrix();

  nlohmann::json j;
  j["format"] = "dimv-model";
  j["version"] = kModelFormatVersion;
  j["p"] = p;
  j["means"] = encode_doubles(model.standardizer.means.data(), p);
  j["scales"] = encode_doubles(model.standardizer.scales.data(), p);
  j["mu"] = encode_doubles(model.mu.mu.data(), p);
  j["covariance"] = encode_doubles(cov_rm.data(), p * p);
  j["covariance_space"] =
      model.config.standardize ? "standardized" : "original";
  j["config"] = {{"tau", model.config.tau},
                 {"k", model.config.k},
                 {"alpha", model.config.alpha},
                 {"init_with_zero", model.config.init_with_zero},
                 {"standardize", model.config.standardize}};

  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed writing " + path);
}

ImputationModel read_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }

  if (j.value("format", "") != "dimv-model") {
    throw VersionError(path + ": not a dimv model file");
  }
  if (j.value("version", -1) != kModelFormatVersion) {
    throw VersionError(path + ": unsupported model version " +
                       j["version"].dump());
  }
  const auto p = j.at("p").get<Eigen::Index>();
  if (p < 1) throw ValidationError(path + ": invalid feature count");

  ImputationModel model;
  const auto means = decode_doubles(j.at("means").get<std::string>(), p);
  const auto scales = decode_doubles(j.at("scales").get<std::string>(), p);
  const auto mu = decode_doubles(j.at("mu").get<std::string>(), p);
  const auto cov = decode_doubles(j.at("covariance").get<std::string>(), p * p);

  model.standardizer.means = Eigen::Map<const Eigen::VectorXd>(means.data(), p);
  model.standardizer.scales =
      Eigen::Map<const Eigen::VectorXd>(scales.data(), p);
  model.mu.mu = Eigen::Map<const Eigen::VectorXd>(mu.data(), p);
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!(model.standardizer.scales[i] > 0.0)) {
      throw ValidationError(path + ": nonpositive scale for feature " +
                            std::to_string(i));
    }
  }

  Eigen::MatrixXd sigma(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index k = 0; k < p; ++k) {
      sigma(i, k) = cov[static_cast<std::size_t>(i * p + k)];
    }
  }
  // The CovarianceMatrix constructor rejects any asymmetry (tolerance 0).
  model.sigma = CovarianceMatrix(std::move(sigma));

  const auto& cfg = j.at("config");
  model.config.tau = cfg.at("tau").get<double>();
  model.config.k = cfg.at("k").get<Eigen::Index>();
  model.config.alpha = cfg.at("alpha").get<double>();
  model.config.init_with_zero = cfg.at("init_with_zero").get<bool>();
  model.config.standardize = cfg.at("standardize").get<bool>();
  validate(model.config);
  return model;
}

}  // namespace dimv
