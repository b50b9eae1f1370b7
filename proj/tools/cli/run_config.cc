//
// Copyright 2026 The DPGM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "cli/run_config.h"

#include <algorithm>
#include <map>

#include "CLI11.hpp"
#include "dpgm/errors.h"

namespace dpgm::cli {
namespace {

const std::map<std::string, Command>& CommandNames() {
  static const auto* names = new std::map<std::string, Command>{
      {"accountant", Command::kAccountant}, {"cluster", Command::kCluster},
      {"train", Command::kTrain},           {"generate", Command::kGenerate},
      {"evaluate", Command::kEvaluate},
  };
  return *names;
}

void Require(bool condition, const std::string& message) {
  if (!condition) throw DomainError(message);
}

void CheckRequiredInputs(const RunConfig& config) {
  switch (config.command) {
    case Command::kAccountant:
      Require(config.q || config.dataset_size,
              "accountant needs --q or --dataset-size");
      Require(config.dpgm.delta || config.dataset_size,
              "accountant needs --delta or --dataset-size");
      Require(!config.q || (*config.q > 0.0 && *config.q <= 1.0),
              "--q must lie in (0, 1]");
      Require(!config.dataset_size || *config.dataset_size > 0,
              "--dataset-size must be positive");
      for (double e : config.epochs_grid) {
        Require(e >= 0.0, "--epochs-grid entries must be non-negative");
      }
      break;
    case Command::kCluster:
      Require(!config.data_path.empty(), "cluster needs a dataset (--data)");
      break;
    case Command::kTrain:
      Require(!config.data_path.empty(), "train needs a dataset (--data)");
      Require(!config.output_path.empty(),
              "train needs a model output path (--output)");
      break;
    case Command::kGenerate:
      Require(!config.model_path.empty(), "generate needs --model");
      Require(!config.output_path.empty(), "generate needs --output");
      Require(config.count >= 1, "generate needs --count >= 1");
      Require(config.burn_in >= 1, "--burn-in must be at least 1");
      break;
    case Command::kEvaluate:
      Require(!config.data_path.empty(), "evaluate needs a dataset (--data)");
      Require(!config.synthetic_path.empty(),
              "evaluate needs synthetic records (--synthetic)");
      Require(config.queries > 0 && config.queries % kWorkloadSubsets == 0,
              "--queries must be a positive multiple of 5");
      break;
  }
}

}  // namespace

std::string ToString(Command command) {
  for (const auto& [name, value] : CommandNames()) {
    if (value == command) return name;
  }
  return "unknown";
}

RunConfig ParseConfig(const std::vector<std::string>& args) {
  RunConfig config;
  DpgmConfig& d = config.dpgm;

  CLI::App app{"Differentially private mixture of generative models", "dpgm"};
  auto* config_option =
      app.set_config("--config", "", "TOML/INI file with option defaults");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);
  for (const auto& [name, command] : CommandNames()) {
    app.add_subcommand(name)->fallthrough();
  }
  app.get_subcommand("accountant")
      ->description("print the epsilon table over epochs as CSV");
  app.get_subcommand("cluster")->description(
      "private kernel k-means summary (ACC with --labels)");
  app.get_subcommand("train")->description("train and save a mixture model");
  app.get_subcommand("generate")
      ->description("sample synthetic records from a trained model");
  app.get_subcommand("evaluate")
      ->description("score synthetic records on a counting-query workload");

  std::string format = "sparse";
  std::string semantics = "any";
  double delta = 0.0;
  double q = 0.0;
  std::size_t dataset_size = 0;
  bool unsafe = false;

  app.add_option("--data", config.data_path, "input records");
  app.add_option("--format", format, "sparse or dense")
      ->check(CLI::IsMember({"sparse", "dense"}))
      ->capture_default_str();
  app.add_option("--binarize-threshold", config.binarize_threshold,
                 "dense cells above this become 1")
      ->check(CLI::Range(0, 255))
      ->capture_default_str();
  app.add_option("--labels", config.labels_path, "one label per record");
  app.add_option("--model", config.model_path, "trained model JSON");
  app.add_option("--synthetic", config.synthetic_path,
                 "synthetic records (sparse)");
  app.add_option("--output", config.output_path, "primary output file");
  app.add_option("--log", config.log_path, "training log (JSON lines)");
  app.add_option("--report", config.report_path, "JSON report");
  app.add_option("--csv", config.csv_path, "CSV report");

  app.add_option("-k,--k", d.k, "clusters")->capture_default_str();
  app.add_option("--d", d.feature_dimension, "random features")
      ->capture_default_str();
  app.add_option("--gamma", d.gamma, "RBF width (0 selects 1/m)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--kmeans-iterations", d.kmeans_iterations,
                 "k-means iterations")
      ->capture_default_str();
  app.add_option("--sigma-c", d.sigma_c, "norm selection noise")
      ->capture_default_str();
  app.add_option("--sigma-k", d.sigma_k, "k-means noise")
      ->capture_default_str();
  app.add_option("--sigma-g", d.sigma_g, "gradient noise")
      ->capture_default_str();
  app.add_flag("--rbf-mode,!--no-rbf-mode", d.rbf_mode,
               "constant feature clip bound")
      ->capture_default_str();
  auto* batch =
      app.add_option("--batch-size", d.batch_size, "expected batch size")
          ->capture_default_str();
  app.add_option("--epochs", d.epochs, "SGD epochs")->capture_default_str();
  app.add_option("--learning-rate", d.learning_rate, "learning rate")
      ->capture_default_str();
  app.add_option("--hidden", d.hidden_units, "RBM hidden units")
      ->capture_default_str();
  app.add_option("--gibbs-steps", d.gibbs_steps, "PCD sweeps per step")
      ->capture_default_str();
  app.add_option("--weight-stddev", d.weight_stddev, "RBM init scale")
      ->capture_default_str();
  app.add_option("--c-max", d.norm.c_max, "norm histogram range")
      ->capture_default_str();
  app.add_option("--bins", d.norm.bins, "norm histogram bins")
      ->capture_default_str();
  auto* delta_option =
      app.add_option("--delta", delta, "target delta (default 1/|D|)");
  app.add_option("--lambda-max", d.lambda_max, "largest moment order")
      ->capture_default_str();
  app.add_flag("--strict-gaussian", d.strict_gaussian,
               "use the exact Gaussian moment (twice the default)");
  app.add_option("--seed", d.seed, "master seed")->capture_default_str();
  app.add_flag("--unsafe-no-privacy", unsafe, "permit zero noise scales");
  app.add_option("--workers", config.workers, "worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* q_option = app.add_option("--q", q, "sampling probability");
  q_option->excludes(batch);
  auto* size_option =
      app.add_option("--dataset-size", dataset_size, "|D| for accounting");
  app.add_option("--epochs-grid", config.epochs_grid,
                 "epochs at which to report epsilon")
      ->delimiter(',');

  app.add_option("--count", config.count, "synthetic records");
  app.add_option("--burn-in", config.burn_in, "Gibbs sweeps per sample")
      ->capture_default_str();
  app.add_option("--queries", config.queries, "workload size")
      ->capture_default_str();
  app.add_option("--semantics", semantics, "any or all")
      ->check(CLI::IsMember({"any", "all"}))
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
  } catch (const CLI::ParseError& e) {
    throw DomainError(e.what());
  }

  for (const auto& [name, command] : CommandNames()) {
    if (app.got_subcommand(name)) config.command = command;
  }
  if (config_option->count() > 0) {
    config.config_path = config_option->as<std::string>();
  }
  config.format =
      format == "dense" ? DataFormat::kDenseCsv : DataFormat::kSparseItems;
  config.semantics = ParseQuerySemantics(semantics);
  if (delta_option->count() > 0 || delta != 0.0) d.delta = delta;
  if (q_option->count() > 0 || q != 0.0) config.q = q;
  if (size_option->count() > 0 || dataset_size != 0) {
    config.dataset_size = dataset_size;
  }

  d.allow_zero_noise = unsafe;
  if (!unsafe && (d.sigma_c == 0.0 || d.sigma_k == 0.0 || d.sigma_g == 0.0)) {
    throw DomainError(
        "a zero noise scale disables privacy; pass --unsafe-no-privacy to "
        "allow it");
  }
  d.Validate();
  CheckRequiredInputs(config);
  return config;
}

void ResolveDelta(RunConfig& config, std::size_t dataset_size) {
  if (dataset_size == 0) throw DomainError("empty dataset");
  if (!config.dpgm.delta) {
    config.dpgm.delta = 1.0 / static_cast<double>(dataset_size);
  }
}

nlohmann::json ToJson(const RunConfig& config) {
  nlohmann::json out = {
      {"command", ToString(config.command)},
      {"data", config.data_path},
      {"format", config.format == DataFormat::kDenseCsv ? "dense" : "sparse"},
      {"binarize_threshold", config.binarize_threshold},
      {"labels", config.labels_path},
      {"model", config.model_path},
      {"synthetic", config.synthetic_path},
      {"parameters", ToJson(config.dpgm)},
      {"epochs_grid", config.epochs_grid},
      {"count", config.count},
      {"burn_in", config.burn_in},
      {"queries", config.queries},
      {"semantics", ToString(config.semantics)},
      {"workers", config.workers},
  };
  out["q"] = config.q ? nlohmann::json(*config.q) : nlohmann::json(nullptr);
  out["dataset_size"] = config.dataset_size
                            ? nlohmann::json(*config.dataset_size)
                            : nlohmann::json(nullptr);
  return out;
}

}  // namespace dpgm::cli
