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

#include "dpgm/mixture.h"

#include <cmath>
#include <string>
#include <vector>

#include "dpgm/errors.h"
#include "dpgm/random.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "testing/corpora.h"

namespace dpgm {
namespace {

using ::testing::Each;
using ::testing::Ge;

DpgmConfig SmallConfig() {
  DpgmConfig config;
  config.k = 2;
  config.feature_dimension = 64;
  config.kmeans_iterations = 3;
  config.batch_size = 50;
  config.epochs = 1.0;
  config.learning_rate = 0.05;
  config.hidden_units = 8;
  config.seed = 42;
  return config;
}

BinaryDataset SmallDataset() {
  Rng rng(1);
  return testing::BernoulliMixture(
      600, testing::BlockPrototypes(2, 12, 0.8, 0.1), rng);
}

// A two-component mixture whose components emit fixed, distinct records.
MixtureModel TwoPointMixture(double w0, double w1) {
  MixtureModel mixture;
  mixture.m = 4;
  mixture.k = 2;
  mixture.weights = {w0, w1};
  for (int c = 0; c < 2; ++c) {
    RbmModel model(4, 1);
    model.visible_bias.setConstant(-30.0);
    model.visible_bias[c] = 30.0;
    mixture.models.push_back(model);
  }
  return mixture;
}

TEST(SelectWeightedTest, FollowsMultinomialProportions) {
  const std::vector<double> weights = {0.5, 0.3, 0.2};
  const int draws = 20000;
  std::vector<int> counts(3, 0);
  Rng rng(2);
  for (int i = 0; i < draws; ++i) ++counts[SelectWeighted(weights, rng)];
  double chi_square = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double expected = weights[c] * draws;
    chi_square += std::pow(counts[c] - expected, 2) / expected;
  }
  // 99.9th percentile of chi-square with two degrees of freedom.
  EXPECT_LT(chi_square, 13.82);
}

TEST(SelectWeightedTest, ZeroWeightIsNeverChosen) {
  const std::vector<double> weights = {100.0, 0.0};
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(SelectWeighted(weights, rng), 0);
}

TEST(SelectWeightedTest, RejectsDegenerateWeights) {
  Rng rng(4);
  EXPECT_THROW(SelectWeighted(std::vector<double>{0.0, 0.0}, rng), DomainError);
  EXPECT_THROW(SelectWeighted(std::vector<double>{1.0, -0.5}, rng),
               DomainError);
}

TEST(GenerateTest, ComponentShareIsBinomial) {
  const MixtureModel mixture = TwoPointMixture(600.0, 400.0);
  Rng rng(5);
  const int count = 10000;
  const BinaryDataset synthetic = GenerateSynthetic(mixture, count, 1, rng);
  ASSERT_EQ(synthetic.size(), static_cast<std::size_t>(count));
  int first = 0;
  for (const auto& record : synthetic.records()) {
    EXPECT_NE(record[0], record[1]);
    first += record[0];
  }
  const double sd = std::sqrt(count * 0.6 * 0.4);
  EXPECT_NEAR(first, 0.6 * count, 3.0 * sd);
}

TEST(GenerateTest, SameSeedSameRecords) {
  const MixtureModel mixture = TwoPointMixture(1.0, 1.0);
  Rng a(6), b(6);
  EXPECT_EQ(GenerateSynthetic(mixture, 50, 2, a).records(),
            GenerateSynthetic(mixture, 50, 2, b).records());
}

TEST(DpgmConfigTest, ValidateRejectsBadValues) {
  DpgmConfig config = SmallConfig();
  EXPECT_NO_THROW(config.Validate());
  config.k = 0;
  EXPECT_THROW(config.Validate(), DomainError);
  config = SmallConfig();
  config.sigma_g = 0.0;
  EXPECT_THROW(config.Validate(), DomainError);
  config.allow_zero_noise = true;
  EXPECT_NO_THROW(config.Validate());
  config = SmallConfig();
  config.delta = 1.0;
  EXPECT_THROW(config.Validate(), DomainError);
}

TEST(DpgmConfigTest, PrivacyDefaultsDeltaToInverseSize) {
  const PrivacyConfig privacy = SmallConfig().Privacy(600);
  EXPECT_DOUBLE_EQ(privacy.delta, 1.0 / 600.0);
  EXPECT_DOUBLE_EQ(privacy.q, 50.0 / 600.0);
  EXPECT_EQ(privacy.t_s, 12);
  EXPECT_EQ(privacy.t_k, 3);
}

TEST(TrainDpgmTest, SingleClusterMatchesDirectTraining) {
  const BinaryDataset data = SmallDataset();
  DpgmConfig config = SmallConfig();
  config.k = 1;
  const MixtureModel mixture = TrainDpgm(data, config);
  ASSERT_EQ(mixture.models.size(), 1u);

  const SeedTree seeds(config.seed);
  Rng init = seeds.Stream(kModelInitStream);
  RbmTrainer trainer(
      RandomRbm(12, config.hidden_units, config.weight_stddev, init),
      PersistentChains(
          config.batch_size, 12,
          SeedTree(seeds.ChildSeed(kChainsStream)).ChildSeed("cluster-0")),
      config.gibbs_steps);
  SgdConfig sgd;
  sgd.sigma_c = config.sigma_c;
  sgd.sigma_g = config.sigma_g;
  sgd.batch_size = config.batch_size;
  sgd.learning_rate = config.learning_rate;
  SgdState state = SgdState::Initial(sgd);
  Rng sampling = seeds.Stream(kSgdSamplingStream);
  Rng noise = seeds.Stream(kSgdNoiseStream);
  for (std::int64_t t = 0; t < mixture.privacy.t_s; ++t) {
    DpSgdStep(trainer, data, sgd, state, sampling, noise);
  }
  EXPECT_EQ(mixture.models[0].Flatten(), trainer.model().Flatten());
}

TEST(TrainDpgmTest, NoSgdStepsLeavesModelsAtInitialization) {
  DpgmConfig config = SmallConfig();
  config.epochs = 0.0;
  const MixtureModel mixture = TrainDpgm(SmallDataset(), config);
  EXPECT_EQ(mixture.privacy.t_s, 0);
  Rng init = SeedTree(config.seed).Stream(kModelInitStream);
  for (const auto& model : mixture.models) {
    EXPECT_EQ(model.Flatten(),
              RandomRbm(12, config.hidden_units, config.weight_stddev, init)
                  .Flatten());
  }
}

TEST(TrainDpgmTest, ReportsEpsilonOfItsConfiguration) {
  const BinaryDataset data = SmallDataset();
  const DpgmConfig config = SmallConfig();
  const MixtureModel mixture = TrainDpgm(data, config);
  const EpsilonResult expected = EpsilonForDelta(config.Privacy(data.size()));
  EXPECT_EQ(mixture.epsilon.epsilon, expected.epsilon);
  EXPECT_EQ(mixture.epsilon.lambda, expected.lambda);
  EXPECT_THAT(mixture.weights, Each(Ge(0.0)));
}

TEST(TrainDpgmTest, LogsClusteringAndEveryStep) {
  std::vector<nlohmann::json> lines;
  const MixtureModel mixture =
      TrainDpgm(SmallDataset(), SmallConfig(),
                [&](const nlohmann::json& line) { lines.push_back(line); });
  ASSERT_EQ(lines.size(), 1u + mixture.privacy.t_s);
  EXPECT_EQ(lines.front()["event"], "kmeans");
  EXPECT_EQ(lines.back()["event"], "sgd_step");
  EXPECT_EQ(lines.back()["iteration"], mixture.privacy.t_s - 1);
}

TEST(TrainDpgmTest, SameSeedIsBitIdentical) {
  const BinaryDataset data = SmallDataset();
  EXPECT_EQ(ToJson(TrainDpgm(data, SmallConfig())).dump(),
            ToJson(TrainDpgm(data, SmallConfig())).dump());
}

TEST(TrainDpgmTest, StageErrorsNameTheStage) {
  DpgmConfig config = SmallConfig();
  config.k = 700;
  try {
    TrainDpgm(SmallDataset(), config);
    FAIL() << "expected a stage error";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "kmeans");
  }
}

TEST(SerializationTest, OmitsPerRecordState) {
  const MixtureModel mixture = TrainDpgm(SmallDataset(), SmallConfig());
  const std::string text = ToJson(mixture).dump();
  EXPECT_EQ(text.find("assignments"), std::string::npos);
  EXPECT_EQ(text.find("true_sizes"), std::string::npos);
  EXPECT_EQ(text.find("noisy_sizes_per_iteration"), std::string::npos);
}

TEST(SerializationTest, JsonRoundTrip) {
  const MixtureModel mixture = TrainDpgm(SmallDataset(), SmallConfig());
  const nlohmann::json j = ToJson(mixture);
  const MixtureModel back = MixtureFromJson(j);
  EXPECT_EQ(back.m, mixture.m);
  EXPECT_EQ(back.k, mixture.k);
  EXPECT_EQ(back.weights, mixture.weights);
  EXPECT_EQ(back.centers, mixture.centers);
  EXPECT_EQ(back.feature_map.w, mixture.feature_map.w);
  EXPECT_EQ(back.epsilon.epsilon, mixture.epsilon.epsilon);
  for (int c = 0; c < mixture.k; ++c) {
    EXPECT_EQ(back.models[c].Flatten(), mixture.models[c].Flatten());
  }
  EXPECT_EQ(ToJson(back).dump(), j.dump());
  // The stored budget can be recomputed from the stored accounting inputs.
  EXPECT_EQ(EpsilonForDelta(back.privacy).epsilon, mixture.epsilon.epsilon);
}

TEST(SerializationTest, RejectsMalformedFiles) {
  nlohmann::json j = ToJson(TrainDpgm(SmallDataset(), SmallConfig()));
  nlohmann::json wrong_version = j;
  wrong_version["version"] = 99;
  EXPECT_THROW(MixtureFromJson(wrong_version), ValidationError);
  nlohmann::json missing = j;
  missing.erase("weights");
  EXPECT_THROW(MixtureFromJson(missing), ValidationError);
  nlohmann::json short_weights = j;
  short_weights["weights"] = {1.0};
  EXPECT_THROW(MixtureFromJson(short_weights), ValidationError);
}

}  // namespace
}  // namespace dpgm
