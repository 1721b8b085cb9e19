// Command-line interface for the imputation toolkit.
//
// Exit codes: 0 success, 1 usage error, 2 data/validation error,
// 3 numerical error (singularity or estimation failure).

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dimv/confidence.hpp"
#include "dimv/csv.hpp"
#include "dimv/errors.hpp"
#include "dimv/evaluation.hpp"
#include "dimv/impute.hpp"
#include "dimv/model_io.hpp"
#include "dimv/rng.hpp"
#include "dimv/tune.hpp"

namespace {

using nlohmann::json;

struct CommonFlags {
  std::string na_token = "NA";
  bool no_header = false;
};

dimv::CsvConvention convention(const CommonFlags& flags) {
  dimv::CsvConvention conv;
  conv.na_token = flags.na_token;
  conv.has_header = !flags.no_header;
  return conv;
}

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--na", flags.na_token, "Missing-value token")
      ->capture_default_str();
  cmd->add_flag("--no-header", flags.no_header,
                "Treat the first CSV line as data");
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw dimv::ValidationError("cannot parse grid value '" + item + "'");
    }
  }
  return values;
}

// "0.1..0.8" (step 0.1), "0.1..0.8..0.05", or a comma list.
std::vector<double> parse_rates(const std::string& text) {
  const auto range_pos = text.find("..");
  if (range_pos == std::string::npos) return parse_grid(text);
  try {
    const double start = std::stod(text.substr(0, range_pos));
    const std::string rest = text.substr(range_pos + 2);
    const auto step_pos = rest.find("..");
    const double stop =
        std::stod(step_pos == std::string::npos ? rest
                                                : rest.substr(0, step_pos));
    const double step = step_pos == std::string::npos
                            ? 0.1
                            : std::stod(rest.substr(step_pos + 2));
    if (!(step > 0.0)) {
      throw dimv::ValidationError("rate range step must be positive");
    }
    std::vector<double> rates;
    for (double r = start; r <= stop + 1e-12; r += step) {
      rates.push_back(r);
    }
    return rates;
  } catch (const dimv::Error&) {
    throw;
  } catch (const std::exception&) {
    throw dimv::ValidationError("cannot parse rate range '" + text + "'");
  }
}

json coefficient_to_json(const dimv::CoefficientReport& report) {
  json j;
  j["feature"] = report.feature;
  j["predictors"] = report.predictors;
  j["beta"] = std::vector<double>(report.beta.data(),
                                  report.beta.data() + report.beta.size());
  j["alpha_used"] = report.alpha_used;
  return j;
}

int run(int argc, char** argv) {
  CLI::App app{"Missing-data imputation via directly estimated Gaussian "
               "parameters and regularized conditional means"};
  app.require_subcommand(1);

  // --- estimate ---------------------------------------------------------
  auto* estimate = app.add_subcommand(
      "estimate", "Fit means/covariance on incomplete data, save a model");
  CommonFlags est_flags;
  std::string est_train, est_out;
  std::string est_mean_csv, est_cov_csv;
  bool est_raw = false;
  estimate->add_option("--train", est_train, "Training CSV")->required();
  estimate->add_option("--out", est_out, "Model JSON path")->required();
  estimate->add_option("--mean-csv", est_mean_csv,
                       "Also export the mean vector (original units)");
  estimate->add_option("--cov-csv", est_cov_csv,
                       "Also export the full covariance (original units)");
  estimate->add_flag("--raw", est_raw,
                     "Skip standardization; data is used as-is");
  add_common(estimate, est_flags);

  // --- impute -----------------------------------------------------------
  auto* impute = app.add_subcommand("impute", "Fill missing test entries");
  CommonFlags imp_flags;
  std::string imp_train, imp_test, imp_out, imp_model, imp_coeffs;
  double imp_alpha = 0.0, imp_tau = 0.0;
  Eigen::Index imp_k = 1;
  bool imp_init_zero = false, imp_tune = false, imp_raw = false;
  std::string imp_grid = "0,0.01,0.1,1,10,100";
  Eigen::Index imp_subsample = 0;
  std::uint64_t imp_seed = 0;
  impute->add_option("--train", imp_train, "Training CSV");
  impute->add_option("--test", imp_test, "CSV with missing entries")
      ->required();
  impute->add_option("--out", imp_out, "Imputed CSV path")->required();
  impute->add_option("--model", imp_model, "Reuse a saved model");
  impute->add_option("--alpha", imp_alpha, "Ridge parameter")
      ->capture_default_str();
  impute->add_flag("--tune", imp_tune, "Grid-search alpha on the train set");
  impute->add_option("--tau", imp_tau, "Correlation threshold")
      ->capture_default_str();
  impute->add_option("--k", imp_k, "Top-k fallback count")
      ->capture_default_str();
  impute->add_flag("--init-zero", imp_init_zero,
                   "Zero-initialize missing values (single block per feature)");
  impute->add_option("--coeffs", imp_coeffs,
                     "Write per-block coefficient reports to this JSON file");
  impute->add_option("--grid", imp_grid, "Alpha grid for --tune")
      ->capture_default_str();
  impute->add_option("--subsample", imp_subsample,
                     "Row budget for --tune (0 = all rows)");
  impute->add_option("--seed", imp_seed, "RNG seed")->capture_default_str();
  impute->add_flag("--raw", imp_raw, "Skip standardization");
  add_common(impute, imp_flags);

  // --- tune -------------------------------------------------------------
  auto* tune = app.add_subcommand("tune", "Grid-search the ridge parameter");
  CommonFlags tune_flags;
  std::string tune_train;
  std::string tune_grid = "0,0.01,0.1,1,10,100";
  Eigen::Index tune_subsample = 0;
  std::uint64_t tune_seed = 0;
  double tune_tau = 0.0;
  Eigen::Index tune_k = 1;
  bool tune_raw = false;
  tune->add_option("--train", tune_train, "Training CSV")->required();
  tune->add_option("--grid", tune_grid, "Comma-separated alpha candidates")
      ->capture_default_str();
  tune->add_option("--subsample", tune_subsample,
                   "Row budget (0 = all rows)");
  tune->add_option("--seed", tune_seed, "RNG seed")->capture_default_str();
  tune->add_option("--tau", tune_tau, "Correlation threshold")
      ->capture_default_str();
  tune->add_option("--k", tune_k, "Top-k fallback count")
      ->capture_default_str();
  tune->add_flag("--raw", tune_raw, "Skip standardization");
  add_common(tune, tune_flags);

  // --- simulate ---------------------------------------------------------
  auto* simulate =
      app.add_subcommand("simulate", "Corrupt a complete dataset");
  CommonFlags sim_flags;
  std::string sim_in, sim_out, sim_mask_out;
  double sim_mcar = -1.0, sim_corner = -1.0, sim_share = 0.5;
  Eigen::Index sim_height = 0, sim_width = 0;
  std::uint64_t sim_seed = 0;
  simulate->add_option("--in", sim_in, "Complete CSV")->required();
  simulate->add_option("--out", sim_out, "Corrupted CSV path")->required();
  simulate->add_option("--mask-out", sim_mask_out,
                       "Missingness mask CSV path (1 = missing)");
  auto* mcar_opt =
      simulate->add_option("--mcar", sim_mcar, "MCAR missing rate in [0, 1]");
  auto* corner_opt = simulate->add_option(
      "--corner", sim_corner, "Corner side fraction in [0, 1]");
  simulate->add_option("--height", sim_height, "Image height (corner mode)");
  simulate->add_option("--width", sim_width, "Image width (corner mode)");
  simulate->add_option("--share", sim_share,
                       "Share of corrupted samples (corner mode)")
      ->capture_default_str();
  simulate->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();
  mcar_opt->excludes(corner_opt);
  add_common(simulate, sim_flags);

  // --- benchmark --------------------------------------------------------
  auto* benchmark =
      app.add_subcommand("benchmark", "Corrupt, impute, and score RMSE");
  CommonFlags bench_flags;
  std::string bench_data, bench_report = "report.json";
  std::string bench_rates, bench_methods = "dimv,mean";
  double bench_corner = -1.0, bench_share = 0.5;
  Eigen::Index bench_height = 0, bench_width = 0;
  double bench_alpha = 0.0, bench_tau = 0.0;
  Eigen::Index bench_k = 1;
  bool bench_init_zero = false, bench_tune = false, bench_raw = false;
  std::string bench_grid = "0,0.01,0.1,1,10,100";
  Eigen::Index bench_subsample = 0;
  unsigned bench_workers = 1;
  std::uint64_t bench_seed = 0;
  benchmark->add_option("--data", bench_data, "Complete ground-truth CSV")
      ->required();
  benchmark->add_option("--rates", bench_rates,
                        "MCAR rates: list '0.1,0.2' or range '0.1..0.8'");
  benchmark->add_option("--corner", bench_corner,
                        "Corner fraction (monotone benchmark)");
  benchmark->add_option("--height", bench_height, "Image height");
  benchmark->add_option("--width", bench_width, "Image width");
  benchmark->add_option("--share", bench_share, "Affected sample share")
      ->capture_default_str();
  benchmark->add_option("--methods", bench_methods,
                        "Comma list of dimv, dimv-complete-case-cov, mean")
      ->capture_default_str();
  benchmark->add_option("--report", bench_report, "Report JSON path")
      ->capture_default_str();
  benchmark->add_option("--workers", bench_workers, "Concurrent cells")
      ->capture_default_str();
  benchmark->add_option("--seed", bench_seed, "Master seed")
      ->capture_default_str();
  benchmark->add_option("--alpha", bench_alpha, "Ridge parameter")
      ->capture_default_str();
  benchmark->add_flag("--tune", bench_tune, "Tune alpha per cell");
  benchmark->add_option("--grid", bench_grid, "Alpha grid for --tune")
      ->capture_default_str();
  benchmark->add_option("--subsample", bench_subsample,
                        "Tuning row budget (0 = all rows)");
  benchmark->add_option("--tau", bench_tau, "Correlation threshold")
      ->capture_default_str();
  benchmark->add_option("--k", bench_k, "Top-k fallback count")
      ->capture_default_str();
  benchmark->add_flag("--init-zero", bench_init_zero,
                      "Zero-initialize missing values");
  benchmark->add_flag("--raw", bench_raw, "Skip standardization");
  add_common(benchmark, bench_flags);

  // --- explain ----------------------------------------------------------
  auto* explain = app.add_subcommand(
      "explain", "Ridge coefficients of one imputation as JSON");
  std::string exp_model, exp_observed;
  Eigen::Index exp_feature = -1;
  double exp_alpha = -1.0;
  explain->add_option("--model", exp_model, "Model JSON")->required();
  explain->add_option("--feature", exp_feature, "Target feature index")
      ->required();
  explain->add_option("--observed", exp_observed,
                      "Comma list of observed feature indices")
      ->required();
  explain->add_option("--alpha", exp_alpha,
                      "Ridge parameter (default: the model's)");

  // --- confidence -------------------------------------------------------
  auto* confidence = app.add_subcommand(
      "confidence", "Chi-square ellipsoid for a row's missing entries");
  CommonFlags conf_flags;
  std::string conf_model, conf_row;
  double conf_level = 0.05;
  confidence->add_option("--model", conf_model, "Model JSON")->required();
  confidence->add_option("--row", conf_row, "One-row CSV with NAs")
      ->required();
  confidence->add_option("--level", conf_level, "Significance level")
      ->capture_default_str();
  add_common(confidence, conf_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Normalize CLI11's exit-code zoo: help is success, anything else is a
    // usage error.
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*estimate) {
    dimv::ImputationConfig cfg;
    cfg.standardize = !est_raw;
    const dimv::MaskedMatrix train =
        dimv::read_csv(est_train, convention(est_flags));
    const dimv::ImputationModel model = dimv::fit_model(train, cfg);
    dimv::write_model(model, est_out);
    if (!est_mean_csv.empty()) {
      dimv::write_csv(Eigen::MatrixXd(model.mean_original().transpose()),
                      est_mean_csv, convention(est_flags));
    }
    if (!est_cov_csv.empty()) {
      dimv::write_csv(model.covariance_original(), est_cov_csv,
                      convention(est_flags));
    }
    std::cout << "model written to " << est_out << " (p = "
              << model.features() << ")\n";
  }

  if (*impute) {
    dimv::ImputationConfig cfg;
    cfg.tau = imp_tau;
    cfg.k = imp_k;
    cfg.alpha = imp_alpha;
    cfg.init_with_zero = imp_init_zero;
    cfg.standardize = !imp_raw;
    const dimv::CsvConvention conv = convention(imp_flags);
    const dimv::MaskedMatrix test = dimv::read_csv(imp_test, conv);

    std::optional<dimv::ImputationModel> model;
    std::optional<dimv::MaskedMatrix> train;
    if (!imp_train.empty()) train = dimv::read_csv(imp_train, conv);

    if (imp_tune) {
      if (!train) {
        throw dimv::ValidationError("--tune needs --train");
      }
      dimv::AlphaGrid grid;
      grid.candidates = parse_grid(imp_grid);
      grid.seed = imp_seed;
      if (imp_subsample > 0) grid.subsample_rows = imp_subsample;
      const auto tuned = dimv::tune_alpha(*train, cfg, grid);
      cfg.alpha = tuned.alpha;
      std::cout << "tuned alpha = " << tuned.alpha << "\n";
    }

    if (!imp_model.empty()) {
      model = dimv::read_model(imp_model);
    } else if (train) {
      model = dimv::fit_model(*train, cfg);
    } else {
      throw dimv::ValidationError("impute needs --train or --model");
    }

    const dimv::ImputationResult result =
        dimv::impute_with_model(*model, test, cfg);
    dimv::write_csv(result.imputed, imp_out, conv);
    if (!imp_coeffs.empty()) {
      json coeffs = json::array();
      for (const auto& report : result.coefficients) {
        coeffs.push_back(coefficient_to_json(report));
      }
      std::ofstream out(imp_coeffs);
      if (!out) throw dimv::IoError("cannot open " + imp_coeffs);
      out << coeffs.dump(2) << "\n";
    }
    std::cout << "imputed " << test.missing_count() << " entries into "
              << imp_out << "\n";
  }

  if (*tune) {
    dimv::ImputationConfig cfg;
    cfg.tau = tune_tau;
    cfg.k = tune_k;
    cfg.standardize = !tune_raw;
    const dimv::MaskedMatrix train =
        dimv::read_csv(tune_train, convention(tune_flags));
    dimv::AlphaGrid grid;
    grid.candidates = parse_grid(tune_grid);
    grid.seed = tune_seed;
    if (tune_subsample > 0) grid.subsample_rows = tune_subsample;
    const auto result = dimv::tune_alpha(train, cfg, grid);
    json j;
    j["alpha"] = result.alpha;
    j["scores"] = json::array();
    for (std::size_t i = 0; i < grid.candidates.size(); ++i) {
      j["scores"].push_back(
          {{"alpha", grid.candidates[i]}, {"rmse", result.scores[i]}});
    }
    std::cout << j.dump(2) << "\n";
  }

  if (*simulate) {
    const dimv::CsvConvention conv = convention(sim_flags);
    const dimv::MaskedMatrix data = dimv::read_csv(sim_in, conv);
    if (!data.complete()) {
      throw dimv::ValidationError(
          "simulate needs a complete input dataset (found missing entries)");
    }
    dimv::MaskSpec spec;
    spec.seed = sim_seed;
    if (sim_mcar >= 0.0) {
      spec.kind = dimv::MaskSpec::Kind::Mcar;
      spec.rate = sim_mcar;
    } else if (sim_corner >= 0.0) {
      spec.kind = dimv::MaskSpec::Kind::MonotoneCorner;
      spec.fraction = sim_corner;
      spec.image_height = sim_height;
      spec.image_width = sim_width;
      spec.affected_share = sim_share;
    } else {
      throw dimv::ValidationError("simulate needs --mcar or --corner");
    }
    const dimv::BoolMatrix missing =
        dimv::generate_mask(data.rows(), data.cols(), spec);
    dimv::write_csv(dimv::apply_missing(data.values, missing), sim_out, conv);
    if (!sim_mask_out.empty()) {
      dimv::write_mask_csv(missing, sim_mask_out, conv);
    }
    std::cout << "deleted " << missing.cast<Eigen::Index>().sum()
              << " entries into " << sim_out << "\n";
  }

  if (*benchmark) {
    const dimv::CsvConvention conv = convention(bench_flags);
    const dimv::MaskedMatrix data = dimv::read_csv(bench_data, conv);
    if (!data.complete()) {
      throw dimv::ValidationError(
          "benchmark needs a complete ground-truth dataset");
    }

    std::vector<dimv::MaskSpec> specs;
    if (!bench_rates.empty()) {
      for (const double rate : parse_rates(bench_rates)) {
        dimv::MaskSpec spec;
        spec.kind = dimv::MaskSpec::Kind::Mcar;
        spec.rate = rate;
        spec.seed = dimv::mix_seed(bench_seed, specs.size());
        specs.push_back(spec);
      }
    }
    if (bench_corner >= 0.0) {
      dimv::MaskSpec spec;
      spec.kind = dimv::MaskSpec::Kind::MonotoneCorner;
      spec.fraction = bench_corner;
      spec.image_height = bench_height;
      spec.image_width = bench_width;
      spec.affected_share = bench_share;
      spec.seed = dimv::mix_seed(bench_seed, specs.size());
      specs.push_back(spec);
    }
    if (specs.empty()) {
      throw dimv::ValidationError("benchmark needs --rates or --corner");
    }

    dimv::BenchmarkOptions options;
    options.methods.clear();
    std::stringstream methods(bench_methods);
    std::string method;
    while (std::getline(methods, method, ',')) {
      options.methods.push_back(method);
    }
    options.config.tau = bench_tau;
    options.config.k = bench_k;
    options.config.alpha = bench_alpha;
    options.config.init_with_zero = bench_init_zero;
    options.config.standardize = !bench_raw;
    options.workers = bench_workers;
    options.tune = bench_tune;
    options.grid.candidates = parse_grid(bench_grid);
    if (bench_subsample > 0) options.grid.subsample_rows = bench_subsample;

    const dimv::BenchmarkReport report =
        dimv::run_benchmark(data.values, bench_data, specs, options);
    dimv::write_report_json(report, bench_report);
    std::string csv_path = bench_report;
    const auto dot = csv_path.rfind('.');
    if (dot != std::string::npos) csv_path.resize(dot);
    csv_path += ".csv";
    dimv::write_report_csv(report, csv_path);

    for (const auto& row : report.rows) {
      std::printf("%-24s", row.method.c_str());
      if (row.mask.kind == dimv::MaskSpec::Kind::Mcar) {
        std::printf(" rate=%-5.3g", row.mask.rate);
      } else {
        std::printf(" corner=%-4.2g", row.mask.fraction);
      }
      if (row.failed) {
        std::printf(" FAILED: %s\n", row.error.c_str());
      } else {
        std::printf(" rmse=%-12.6g time=%.3fs\n", row.rmse,
                    row.wall_time_seconds);
      }
    }
    std::cout << "report written to " << bench_report << " and " << csv_path
              << "\n";
  }

  if (*explain) {
    const dimv::ImputationModel model = dimv::read_model(exp_model);
    dimv::FeatureSet observed;
    std::stringstream stream(exp_observed);
    std::string item;
    while (std::getline(stream, item, ',')) {
      try {
        observed.push_back(std::stoll(item));
      } catch (const std::exception&) {
        throw dimv::ValidationError("cannot parse feature index '" + item +
                                    "'");
      }
    }
    std::sort(observed.begin(), observed.end());
    observed.erase(std::unique(observed.begin(), observed.end()),
                   observed.end());
    for (const Eigen::Index j : observed) {
      if (j == exp_feature) {
        throw dimv::ValidationError(
            "the target feature cannot be in the observed set");
      }
    }
    const double alpha = exp_alpha >= 0.0 ? exp_alpha : model.config.alpha;
    const auto report =
        dimv::coefficients(model.sigma, exp_feature, observed, alpha);
    std::cout << coefficient_to_json(report).dump(2) << "\n";
  }

  if (*confidence) {
    const dimv::ImputationModel model = dimv::read_model(conf_model);
    const dimv::MaskedMatrix rows =
        dimv::read_csv(conf_row, convention(conf_flags));
    if (rows.rows() != 1) {
      throw dimv::ValidationError("confidence expects exactly one data row");
    }
    const auto result =
        dimv::row_confidence_region(model, rows, 0, conf_level, 0.0);
    json j;
    j["level"] = conf_level;
    j["dof"] = result.missing_features.size();
    j["missing_features"] = result.missing_features;
    j["threshold"] = result.region.threshold;
    j["center"] = std::vector<double>(
        result.region.center.data(),
        result.region.center.data() + result.region.center.size());
    const auto dim = result.region.shape_inverse.rows();
    json shape = json::array();
    json cov = json::array();
    for (Eigen::Index i = 0; i < dim; ++i) {
      json shape_row = json::array();
      json cov_row = json::array();
      for (Eigen::Index k = 0; k < dim; ++k) {
        shape_row.push_back(result.region.shape_inverse(i, k));
        cov_row.push_back(result.conditional.cov(i, k));
      }
      shape.push_back(shape_row);
      cov.push_back(cov_row);
    }
    j["shape_inverse"] = shape;
    j["conditional_covariance"] = cov;
    std::cout << j.dump(2) << "\n";
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const dimv::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
