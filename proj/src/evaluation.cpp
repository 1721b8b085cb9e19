#include "dimv/evaluation.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dimv/dper.hpp"
#include "dimv/errors.hpp"
#include "dimv/parallel.hpp"
#include "dimv/rng.hpp"

namespace dimv {

double rmse_masked(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& imputed,
                   const BoolMatrix& eval_mask) {
  if (truth.rows() != imputed.rows() || truth.cols() != imputed.cols() ||
      truth.rows() != eval_mask.rows() || truth.cols() != eval_mask.cols()) {
    throw DimensionError("rmse_masked: shape mismatch");
  }
  double sse = 0.0;
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < truth.rows(); ++i) {
    for (Eigen::Index j = 0; j < truth.cols(); ++j) {
      if (eval_mask(i, j)) {
        const double d = truth(i, j) - imputed(i, j);
        sse += d * d;
        ++count;
      }
    }
  }
  if (count == 0) throw ScoringError("empty evaluation mask");
  return std::sqrt(sse / static_cast<double>(count));
}

Eigen::MatrixXd mean_impute(const MaskedMatrix& train,
                            const MaskedMatrix& test) {
  if (train.cols() != test.cols()) {
    throw DimensionError("mean_impute: feature count mismatch");
  }
  const Standardizer s = fit_standardizer(train);  // errors on empty columns
  Eigen::MatrixXd out = test.values;
  for (Eigen::Index i = 0; i < test.rows(); ++i) {
    for (Eigen::Index j = 0; j < test.cols(); ++j) {
      if (!test.mask(i, j)) out(i, j) = s.means[j];
    }
  }
  return out;
}

std::pair<MeanVector, CovarianceMatrix> complete_case_cov(
    const MaskedMatrix& x) {
  const Eigen::Index p = x.cols();
  Eigen::VectorXd mu(p);
  Eigen::VectorXd variances(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double sum = 0.0;
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (x.mask(i, j)) {
        sum += x.values(i, j);
        ++count;
      }
    }
    if (count == 0) {
      throw EstimationError("feature " + std::to_string(j) +
                            " has no observed entries");
    }
    mu[j] = sum / static_cast<double>(count);
    double ss = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (x.mask(i, j)) {
        const double d = x.values(i, j) - mu[j];
        ss += d * d;
      }
    }
    variances[j] = ss / static_cast<double>(count);
  }

  MaskedMatrix centered(
      (x.values.rowwise() - mu.transpose())
          .cwiseProduct(x.mask.cast<double>().matrix()),
      x.mask);

  CovarianceMatrix sigma(p);
  for (Eigen::Index j = 0; j < p; ++j) sigma.set_diagonal(j, variances[j]);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      if (variances[i] == 0.0 || variances[j] == 0.0) continue;
      double value = case_deletion_cov(centered, i, j);
      const double bound = std::sqrt(variances[i] * variances[j]);
      if (std::abs(value) > bound) {
        value = std::copysign(bound * (1.0 - 1e-12), value);
      }
      sigma.set_pair(i, j, value);
    }
  }
  return {MeanVector{std::move(mu)}, std::move(sigma)};
}

ImputationModel fit_model_complete_case(const MaskedMatrix& train,
                                        const ImputationConfig& cfg) {
  validate(cfg);
  Standardizer std_ = cfg.standardize ? fit_standardizer(train)
                                      : Standardizer::identity(train.cols());
  const MaskedMatrix working =
      cfg.standardize ? apply_standardizer(std_, train) : train;
  auto [mu, sigma] = complete_case_cov(working);
  return ImputationModel{std::move(std_), std::move(mu), std::move(sigma),
                         cfg};
}

namespace {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

nlohmann::json mask_to_json(const MaskSpec& spec) {
  nlohmann::json j;
  if (spec.kind == MaskSpec::Kind::Mcar) {
    j["kind"] = "mcar";
    j["rate"] = spec.rate;
  } else {
    j["kind"] = "monotone_corner";
    j["fraction"] = spec.fraction;
    j["image_height"] = spec.image_height;
    j["image_width"] = spec.image_width;
    j["affected_share"] = spec.affected_share;
  }
  j["seed"] = spec.seed;
  return j;
}

nlohmann::json config_to_json(const ImputationConfig& cfg) {
  return nlohmann::json{{"tau", cfg.tau},
                        {"k", cfg.k},
                        {"alpha", cfg.alpha},
                        {"init_with_zero", cfg.init_with_zero},
                        {"standardize", cfg.standardize}};
}

std::string digest_for(const std::string& method, const MaskSpec& spec,
                       const ImputationConfig& cfg) {
  nlohmann::json j{{"method", method},
                   {"mask", mask_to_json(spec)},
                   {"config", config_to_json(cfg)}};
  std::ostringstream hex;
  hex << std::hex << fnv1a(j.dump());
  return hex.str();
}

std::string timestamp_utc() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void validate_methods(const std::vector<std::string>& methods) {
  if (methods.empty()) throw ValidationError("no benchmark methods given");
  for (const auto& m : methods) {
    if (m != "dimv" && m != "dimv-complete-case-cov" && m != "mean") {
      throw ValidationError("unknown benchmark method '" + m +
                            "' (expected dimv, dimv-complete-case-cov, mean)");
    }
  }
}

}  // namespace

BenchmarkReport run_benchmark(const Eigen::MatrixXd& dataset,
                              const std::string& dataset_id,
                              const std::vector<MaskSpec>& specs,
                              const BenchmarkOptions& options) {
  validate(options.config);
  validate_methods(options.methods);
  if (!dataset.allFinite()) {
    throw ValidationError("benchmark dataset must be complete and finite");
  }

  BenchmarkReport report;
  report.dataset = dataset_id;
  report.created_at = timestamp_utc();
  report.rows.resize(specs.size() * options.methods.size());

  parallel_for_index(
      report.rows.size(),
      [&](std::size_t cell) {
        const MaskSpec& spec = specs[cell / options.methods.size()];
        const std::string& method =
            options.methods[cell % options.methods.size()];
        BenchmarkRow row;
        row.method = method;
        row.mask = spec;
        row.seed = spec.seed;
        row.config = options.config;
        row.config_digest = digest_for(method, spec, options.config);
        try {
          const BoolMatrix missing =
              generate_mask(dataset.rows(), dataset.cols(), spec);
          const MaskedMatrix corrupted = apply_missing(dataset, missing);

          const auto start = std::chrono::steady_clock::now();
          Eigen::MatrixXd imputed;
          if (method == "mean") {
            imputed = mean_impute(corrupted, corrupted);
          } else {
            ImputationConfig cfg = options.config;
            if (options.tune) {
              AlphaGrid grid = options.grid;
              grid.seed = mix_seed(spec.seed, 1);
              const TuneResult tuned = tune_alpha(corrupted, cfg, grid);
              cfg.alpha = tuned.alpha;
              row.tuned_alpha = tuned.alpha;
              row.config.alpha = tuned.alpha;
            }
            const ImputationModel model =
                method == "dimv" ? fit_model(corrupted, cfg)
                                 : fit_model_complete_case(corrupted, cfg);
            imputed = impute_with_model(model, corrupted, cfg).imputed;
          }
          const auto stop = std::chrono::steady_clock::now();
          row.wall_time_seconds =
              std::chrono::duration<double>(stop - start).count();
          row.rmse = rmse_masked(dataset, imputed, missing);
        } catch (const std::exception& e) {
          row.failed = true;
          row.error = e.what();
          row.rmse = std::numeric_limits<double>::quiet_NaN();
        }
        report.rows[cell] = std::move(row);
      },
      options.workers == 0 ? 1 : options.workers);

  return report;
}

namespace {

nlohmann::json row_to_json(const BenchmarkRow& row) {
  nlohmann::json j{{"method", row.method},
                   {"mask", mask_to_json(row.mask)},
                   {"rmse", row.failed ? nlohmann::json(nullptr)
                                       : nlohmann::json(row.rmse)},
                   {"wall_time_seconds", row.wall_time_seconds},
                   {"seed", row.seed},
                   {"config", config_to_json(row.config)},
                   {"config_digest", row.config_digest},
                   {"status", row.failed ? "failed" : "ok"}};
  if (row.failed) j["error"] = row.error;
  if (row.tuned_alpha >= 0.0) j["tuned_alpha"] = row.tuned_alpha;
  return j;
}

}  // namespace

void write_report_json(const BenchmarkReport& report, const std::string& path) {
  nlohmann::json j{{"dataset", report.dataset},
                   {"created_at", report.created_at}};
  j["rows"] = nlohmann::json::array();
  for (const auto& row : report.rows) j["rows"].push_back(row_to_json(row));
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed writing " + path);
}

void write_report_csv(const BenchmarkReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "method,mask_kind,rate,fraction,image_height,image_width,"
         "affected_share,seed,rmse,wall_time_seconds,tau,k,alpha,"
         "init_with_zero,status,config_digest\n";
  char buf[512];
  for (const auto& row : report.rows) {
    const bool mcar = row.mask.kind == MaskSpec::Kind::Mcar;
    std::snprintf(
        buf, sizeof(buf),
        "%s,%s,%.17g,%.17g,%lld,%lld,%.17g,%llu,%.17g,%.17g,%.17g,%lld,"
        "%.17g,%d,%s,%s\n",
        row.method.c_str(), mcar ? "mcar" : "monotone_corner",
        mcar ? row.mask.rate : 0.0, mcar ? 0.0 : row.mask.fraction,
        static_cast<long long>(row.mask.image_height),
        static_cast<long long>(row.mask.image_width),
        mcar ? 0.0 : row.mask.affected_share,
        static_cast<unsigned long long>(row.seed), row.rmse,
        row.wall_time_seconds, row.config.tau,
        static_cast<long long>(row.config.k), row.config.alpha,
        row.config.init_with_zero ? 1 : 0, row.failed ? "failed" : "ok",
        row.config_digest.c_str());
    out << buf;
  }
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace dimv
