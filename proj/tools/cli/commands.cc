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

#include "cli/commands.h"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dpgm/accountant.h"
#include "dpgm/errors.h"
#include "dpgm/eval.h"
#include "dpgm/mixture.h"

namespace dpgm::cli {
namespace {

std::shared_ptr<spdlog::logger> Logger() {
  static const std::shared_ptr<spdlog::logger> logger = [] {
    auto created = spdlog::stderr_logger_st("dpgm");
    created->set_pattern("[%l] %v");
    return created;
  }();
  return logger;
}

void ConfigureLogging() {
  const char* level = std::getenv("DPGM_LOG_LEVEL");
  Logger()->set_level(level ? spdlog::level::from_str(level)
                            : spdlog::level::info);
}

// Files created by the running command; removed unless Commit() is called.
class OutputGuard {
 public:
  OutputGuard() = default;
  OutputGuard(const OutputGuard&) = delete;
  OutputGuard& operator=(const OutputGuard&) = delete;
  ~OutputGuard() {
    if (committed_) return;
    for (const auto& path : paths_) {
      std::error_code ignored;
      std::filesystem::remove(path, ignored);
    }
  }

  std::ofstream Open(const std::string& path) {
    paths_.push_back(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    return out;
  }

  void Write(const std::string& path, const std::string& content) {
    std::ofstream out = Open(path);
    out << content;
    if (!out) throw ValidationError("failed writing '" + path + "'");
  }

  void Commit() { committed_ = true; }

 private:
  std::vector<std::string> paths_;
  bool committed_ = false;
};

std::string Dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

BinaryDataset LoadData(const RunConfig& config) {
  LoadOptions options;
  options.format = config.format;
  options.binarize_threshold = config.binarize_threshold;
  BinaryDataset dataset = LoadRecords(config.data_path, options);
  Logger()->info("loaded {} records with m = {}", dataset.size(),
                 dataset.dimension());
  return dataset;
}

PrivacyConfig AccountantConfig(const RunConfig& config, double epochs) {
  const DpgmConfig& d = config.dpgm;
  PrivacyConfig privacy;
  privacy.sigma_c = d.sigma_c;
  privacy.sigma_k = d.sigma_k;
  privacy.sigma_g = d.sigma_g;
  privacy.q = config.q ? *config.q
                       : static_cast<double>(d.batch_size) /
                             static_cast<double>(*config.dataset_size);
  if (privacy.q > 1.0) throw DomainError("batch size exceeds --dataset-size");
  privacy.t_k = d.kmeans_iterations;
  privacy.t_s = SgdIterationsForEpochs(epochs, privacy.q);
  privacy.delta =
      d.delta ? *d.delta : 1.0 / static_cast<double>(*config.dataset_size);
  privacy.rbf_mode = d.rbf_mode;
  privacy.lambda_max = d.lambda_max;
  privacy.strict_gaussian = d.strict_gaussian;
  privacy.j_grid = d.j_grid;
  privacy.Validate();
  return privacy;
}

void RunAccountant(const RunConfig& config, std::ostream& out,
                   OutputGuard& guard) {
  std::vector<double> grid = config.epochs_grid;
  if (grid.empty()) {
    const int whole = static_cast<int>(std::ceil(config.dpgm.epochs));
    for (int e = 1; e <= whole; ++e) grid.push_back(e);
    if (grid.empty() || grid.back() != config.dpgm.epochs) {
      grid.push_back(config.dpgm.epochs);
    }
  }
  std::ostringstream csv;
  csv.precision(10);
  csv << "epochs,t_s,epsilon,lambda\n";
  nlohmann::json table = nlohmann::json::array();
  for (double epochs : grid) {
    const PrivacyConfig privacy = AccountantConfig(config, epochs);
    const EpsilonResult result = EpsilonForDelta(privacy);
    csv << epochs << ',' << privacy.t_s << ',' << result.epsilon << ','
        << result.lambda << '\n';
    table.push_back({{"epochs", epochs},
                     {"t_s", privacy.t_s},
                     {"epsilon", result.epsilon},
                     {"lambda", result.lambda}});
  }
  out << csv.str();

  const PrivacyConfig final_config =
      AccountantConfig(config, config.dpgm.epochs);
  const AlphaProfile profile = ComputeAlphaProfile(final_config);
  const EpsilonResult final_result =
      EpsilonForProfile(profile, final_config.delta);
  Logger()->info("epsilon = {:.4f} at lambda = {} (delta = {:g})",
                 final_result.epsilon, final_result.lambda, final_result.delta);
  if (!config.output_path.empty()) guard.Write(config.output_path, csv.str());
  if (!config.report_path.empty()) {
    guard.Write(config.report_path, Dump({{"config", ToJson(config)},
                                          {"privacy", ToJson(final_config)},
                                          {"result", ToJson(final_result)},
                                          {"alpha_profile", ToJson(profile)},
                                          {"table", table}}));
  }
}

void RunCluster(RunConfig config, std::ostream& out, OutputGuard& guard) {
  const BinaryDataset dataset = LoadData(config);
  std::vector<int> labels;
  if (!config.labels_path.empty()) {
    labels = LoadLabels(config.labels_path);
    if (labels.size() != dataset.size()) {
      throw ValidationError("labels file has " + std::to_string(labels.size()) +
                            " entries for " + std::to_string(dataset.size()) +
                            " records");
    }
  }
  ResolveDelta(config, dataset.size());
  const Partition partition = PartitionDataset(dataset, config.dpgm);

  nlohmann::json summary =
      ClusteringSummaryJson(partition.clustering, partition.kmeans);
  if (!config.dpgm.allow_zero_noise) {
    PrivacyConfig privacy = config.dpgm.Privacy(dataset.size());
    privacy.t_s = 0;
    const EpsilonResult result = EpsilonForDelta(privacy);
    summary["privacy"] = ToJson(result);
  }
  if (!labels.empty()) {
    summary["accuracy"] =
        ClusteringAccuracy(partition.clustering.assignments, labels);
  }
  summary["config"] = ToJson(config);
  const std::string text = Dump(summary);
  if (config.output_path.empty()) {
    out << text;
  } else {
    guard.Write(config.output_path, text);
  }
}

void RunTrain(RunConfig config, OutputGuard& guard) {
  const BinaryDataset dataset = LoadData(config);
  ResolveDelta(config, dataset.size());
  std::ofstream log_file;
  if (!config.log_path.empty()) log_file = guard.Open(config.log_path);
  const LogSink sink = [&](const nlohmann::json& line) {
    if (log_file.is_open()) log_file << line.dump() << '\n';
    if (line.value("event", "") == "kmeans") {
      Logger()->info("k-means done: clip bound {}",
                     line.value("clip_bound", 0.0));
    } else {
      Logger()->debug("{}", line.dump());
    }
  };
  MixtureModel mixture = TrainDpgm(dataset, config.dpgm, sink);
  mixture.config_echo["data"] = {
      {"path", config.data_path},
      {"format", config.format == DataFormat::kDenseCsv ? "dense" : "sparse"},
      {"binarize_threshold", config.binarize_threshold}};
  Logger()->info("trained {} models; epsilon = {:.4f} (delta = {:g})",
                 mixture.models.size(), mixture.epsilon.epsilon,
                 mixture.epsilon.delta);
  guard.Write(config.output_path, Dump(ToJson(mixture)));
}

nlohmann::json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void RunGenerate(const RunConfig& config, OutputGuard& guard) {
  const MixtureModel mixture = MixtureFromJson(ReadJsonFile(config.model_path));
  Rng rng = SeedTree(config.dpgm.seed).Stream(kGenerationStream);
  const BinaryDataset synthetic =
      GenerateSynthetic(mixture, config.count, config.burn_in, rng);
  std::ofstream file = guard.Open(config.output_path);
  WriteSparse(synthetic, file);
  if (!file)
    throw ValidationError("failed writing '" + config.output_path + "'");
  Logger()->info("wrote {} synthetic records", synthetic.size());
}

void RunEvaluate(const RunConfig& config, std::ostream& out,
                 OutputGuard& guard) {
  const BinaryDataset real = LoadData(config);
  LoadOptions synthetic_options;
  synthetic_options.policy = RecordPolicy::kAllowEmpty;
  const BinaryDataset synthetic =
      LoadRecords(config.synthetic_path, synthetic_options);
  Rng rng = SeedTree(config.dpgm.seed).Stream(kWorkloadStream);
  const QueryWorkload workload =
      GenerateWorkload(real.dimension(), real.MaxL1Norm(), config.queries,
                       config.semantics, rng);
  const EvalReport report = EvaluateWorkload(real, synthetic, workload);
  nlohmann::json json = ToJson(report);
  json["config"] = ToJson(config);
  const std::string text = Dump(json);
  if (!config.report_path.empty()) guard.Write(config.report_path, text);
  if (!config.csv_path.empty()) guard.Write(config.csv_path, ToCsv(report));
  if (config.report_path.empty() && config.csv_path.empty()) out << text;
}

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage:
      return kExitUsage;
    case ErrorKind::kData:
      return kExitData;
    case ErrorKind::kNumerical:
      return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace

void Run(const RunConfig& config, std::ostream& out) {
  if (config.workers > 1) {
    Logger()->warn("--workers {} requested; running single-threaded",
                   config.workers);
  }
  OutputGuard guard;
  switch (config.command) {
    case Command::kAccountant:
      RunAccountant(config, out, guard);
      break;
    case Command::kCluster:
      RunCluster(config, out, guard);
      break;
    case Command::kTrain:
      RunTrain(config, guard);
      break;
    case Command::kGenerate:
      RunGenerate(config, guard);
      break;
    case Command::kEvaluate:
      RunEvaluate(config, out, guard);
      break;
  }
  guard.Commit();
}

int Main(const std::vector<std::string>& args, std::ostream& out,
         std::ostream& err) {
  ConfigureLogging();
  try {
    Run(ParseConfig(args), out);
    return kExitOk;
  } catch (const HelpRequested& help) {
    out << help.text;
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return ExitCodeFor(e.kind());
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return kExitNumerical;
  }
}

}  // namespace dpgm::cli
