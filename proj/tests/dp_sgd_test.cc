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

#include "dpgm/dp_sgd.h"

#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "dpgm/accountant.h"
#include "dpgm/errors.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "testing/corpora.h"

namespace dpgm {
namespace {

using ::testing::_;

// Loss 0.5 * |theta - x_i|^2, so the per-example gradient is theta - x_i.
class QuadraticModel : public DifferentiableModel {
 public:
  explicit QuadraticModel(Eigen::VectorXd theta) : theta_(std::move(theta)) {}

  Eigen::VectorXd Parameters() const override { return theta_; }
  void SetParameters(const Eigen::VectorXd& parameters) override {
    theta_ = parameters;
  }
  Eigen::MatrixXd PerExampleLossGradients(const Batch& batch) override {
    Eigen::MatrixXd g(theta_.size(), batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      g.col(i) = theta_ - batch.records[i].ToVector();
    }
    return g;
  }

 private:
  Eigen::VectorXd theta_;
};

// Records which dataset rows were drawn into each batch.
class CountingModel : public QuadraticModel {
 public:
  CountingModel(int m, std::size_t n)
      : QuadraticModel(Eigen::VectorXd::Zero(m)), hits_(n, 0) {}
  Eigen::MatrixXd PerExampleLossGradients(const Batch& batch) override {
    for (std::size_t index : batch.indices) ++hits_[index];
    return QuadraticModel::PerExampleLossGradients(batch);
  }
  const std::vector<int>& hits() const { return hits_; }

 private:
  std::vector<int> hits_;
};

class MockModel : public DifferentiableModel {
 public:
  MOCK_METHOD(Eigen::VectorXd, Parameters, (), (const, override));
  MOCK_METHOD(void, SetParameters, (const Eigen::VectorXd&), (override));
  MOCK_METHOD(Eigen::MatrixXd, PerExampleLossGradients, (const Batch&),
              (override));
};

BinaryDataset RandomDataset(int n, int m, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<BinaryRecord> records;
  for (int i = 0; i < n; ++i)
    records.push_back(testing::RandomRecord(m, 0.5, rng));
  return BinaryDataset(m, records);
}

SgdConfig Noiseless(int batch_size, double learning_rate) {
  SgdConfig config;
  config.sigma_c = 0.0;
  config.sigma_g = 0.0;
  config.batch_size = batch_size;
  config.learning_rate = learning_rate;
  config.fixed_clip_bound = 1e6;
  return config;
}

TEST(ClipGradientTest, ScalesLongGradient) {
  Eigen::VectorXd g(2);
  g << 3.0, 4.0;
  Eigen::VectorXd expected(2);
  expected << 0.6, 0.8;
  EXPECT_TRUE(ClipGradient(g, 1.0).isApprox(expected, 1e-15));
}

TEST(ClipGradientTest, LeavesShortGradient) {
  Eigen::VectorXd g(2);
  g << 0.3, 0.4;
  EXPECT_EQ(ClipGradient(g, 1.0), g);
}

TEST(ClipGradientTest, NeighborSumsDifferByAtMostTwoBounds) {
  Rng rng(1);
  std::normal_distribution<double> normal(0.0, 3.0);
  const double bound = 1.7;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd g(5, 20);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = normal(rng);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(5), b = a;
    for (int i = 0; i < 20; ++i) {
      a += ClipGradient(g.col(i), bound);
      b += ClipGradient(i == trial % 20 ? Eigen::VectorXd(-5.0 * g.col(i))
                                        : Eigen::VectorXd(g.col(i)),
                        bound);
    }
    EXPECT_LE((a - b).norm(), 2.0 * bound + 1e-12);
  }
}

TEST(DpSgdStepTest, NoiselessFullBatchEqualsGradientDescent) {
  const BinaryDataset data = RandomDataset(20, 6, 2);
  Eigen::VectorXd theta = Eigen::VectorXd::Random(6);
  QuadraticModel model(theta);
  const SgdConfig config = Noiseless(20, 0.1);
  SgdState state = SgdState::Initial(config);
  Rng sampling(4), noise(5);
  const Eigen::VectorXd mean = data.ToMatrix().colwise().mean().transpose();
  for (int step = 0; step < 50; ++step) {
    const SgdStepRecord record =
        DpSgdStep(model, data, config, state, sampling, noise);
    ASSERT_EQ(record.batch_size, 20u);
    theta -= 0.1 * (theta - mean);
  }
  EXPECT_LE((model.Parameters() - theta).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(DpSgdStepTest, ZeroLearningRateLeavesParameters) {
  const BinaryDataset data = RandomDataset(50, 4, 6);
  const Eigen::VectorXd theta = Eigen::VectorXd::Random(4);
  QuadraticModel model(theta);
  SgdConfig config;
  config.batch_size = 10;
  config.learning_rate = 0.0;
  SgdState state = SgdState::Initial(config);
  Rng sampling(7), noise(8);
  for (int step = 0; step < 5; ++step) {
    DpSgdStep(model, data, config, state, sampling, noise);
  }
  EXPECT_EQ(model.Parameters(), theta);
}

TEST(DpSgdStepTest, NoiseHasZeroMean) {
  const int batch = 10;
  const BinaryDataset data = RandomDataset(batch, 4, 9);
  SgdConfig config;
  config.sigma_g = 1.0;
  config.batch_size = batch;
  config.learning_rate = 1.0;
  config.fixed_clip_bound = 1.0;
  Eigen::VectorXd clipped_sum = Eigen::VectorXd::Zero(4);
  for (std::size_t i = 0; i < data.size(); ++i) {
    clipped_sum += ClipGradient(-data[i].ToVector(), 1.0);
  }
  const int trials = 10000;
  Eigen::VectorXd total = Eigen::VectorXd::Zero(4);
  Rng sampling(10), noise(11);
  for (int t = 0; t < trials; ++t) {
    QuadraticModel model(Eigen::VectorXd::Zero(4));
    SgdState state = SgdState::Initial(config);
    DpSgdStep(model, data, config, state, sampling, noise);
    total += -model.Parameters() - clipped_sum / batch;
  }
  const double tolerance = 3.0 * std::sqrt(2.0) * 1.0 * 1.0 / (batch * 100.0);
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(total[j] / trials, 0.0, tolerance);
}

TEST(DpSgdStepTest, ClipBoundComesFromPrivateNormOfBatch) {
  const BinaryDataset data = RandomDataset(30, 8, 12);
  const Eigen::VectorXd theta = Eigen::VectorXd::Random(8) * 2.0;
  QuadraticModel model(theta);
  SgdConfig config;
  config.batch_size = 30;
  config.sigma_c = 4.0;
  SgdState state = SgdState::Initial(config);
  std::vector<double> norms;
  for (std::size_t i = 0; i < data.size(); ++i) {
    norms.push_back((theta - data[i].ToVector()).norm());
  }
  Rng sampling(13), noise(14);
  Rng noise_copy = noise;
  const SgdStepRecord record =
      DpSgdStep(model, data, config, state, sampling, noise);
  EXPECT_EQ(record.clip_bound,
            DpNorm(norms, config.sigma_c, config.norm, noise_copy));
  EXPECT_EQ(state.previous_clip_bound, record.clip_bound);
}

TEST(DpSgdStepTest, EmptyBatchAddsPureNoise) {
  const BinaryDataset data = RandomDataset(1000, 3, 15);
  SgdConfig config;
  config.batch_size = 1;
  const double q = 1.0 / 1000.0;
  // Find a sampling stream whose first batch is empty.
  std::uint64_t seed = 0;
  for (;; ++seed) {
    Rng probe(seed);
    if (SampleBatch(data, q, probe).empty()) break;
  }
  MockModel model;
  EXPECT_CALL(model, Parameters()).WillOnce([] {
    return Eigen::VectorXd::Zero(3);
  });
  EXPECT_CALL(model, PerExampleLossGradients(_)).Times(0);
  Eigen::VectorXd updated;
  EXPECT_CALL(model, SetParameters(_)).WillOnce([&](const Eigen::VectorXd& p) {
    updated = p;
  });
  SgdState state = SgdState::Initial(config);
  Rng sampling(seed), noise(16);
  const SgdStepRecord record =
      DpSgdStep(model, data, config, state, sampling, noise);
  EXPECT_EQ(record.batch_size, 0u);
  EXPECT_EQ(record.clip_bound, config.norm.c_max / 2.0);
  EXPECT_GT(updated.norm(), 0.0);
}

TEST(DpSgdStepTest, EpochVisitsEachRecordOnceInExpectation) {
  const BinaryDataset data = RandomDataset(1000, 2, 17);
  CountingModel model(2, data.size());
  SgdConfig config;
  config.batch_size = 100;
  config.fixed_clip_bound = 1.0;
  SgdState state = SgdState::Initial(config);
  const int epochs = 200;
  const std::int64_t steps = SgdIterationsForEpochs(epochs, 0.1);
  ASSERT_EQ(steps, epochs * 10);
  Rng sampling(18), noise(19);
  for (std::int64_t s = 0; s < steps; ++s) {
    DpSgdStep(model, data, config, state, sampling, noise);
  }
  double total = 0.0;
  for (int h : model.hits()) total += h;
  const double per_record_epoch = total / (1000.0 * epochs);
  // Binomial(2e5 * 10, 0.1) standard error over 2e5 record epochs.
  EXPECT_NEAR(per_record_epoch, 1.0, 3.0 * std::sqrt(0.9 / (1000.0 * epochs)));
  EXPECT_EQ(state.step, steps);
}

TEST(DpSgdStepTest, SamplingProbabilityIsClampedToOne) {
  const BinaryDataset data = RandomDataset(5, 2, 20);
  QuadraticModel model(Eigen::VectorXd::Zero(2));
  SgdConfig config = Noiseless(50, 0.1);
  SgdState state = SgdState::Initial(config);
  Rng sampling(21), noise(22);
  const SgdStepRecord record =
      DpSgdStep(model, data, config, state, sampling, noise);
  EXPECT_EQ(record.sampling_probability, 1.0);
  EXPECT_EQ(record.batch_size, 5u);
}

TEST(DpSgdStepTest, RejectsEmptyClusterAndBadShapes) {
  QuadraticModel model(Eigen::VectorXd::Zero(2));
  SgdConfig config;
  SgdState state = SgdState::Initial(config);
  Rng sampling(1), noise(2);
  EXPECT_THROW(
      DpSgdStep(model, BinaryDataset(2, {}), config, state, sampling, noise),
      DomainError);

  MockModel bad;
  EXPECT_CALL(bad, Parameters()).WillRepeatedly([] {
    return Eigen::VectorXd::Zero(3);
  });
  EXPECT_CALL(bad, PerExampleLossGradients(_)).WillOnce([](const Batch& b) {
    return Eigen::MatrixXd::Zero(2, static_cast<Eigen::Index>(b.size()));
  });
  config.batch_size = 10;
  EXPECT_THROW(
      DpSgdStep(bad, RandomDataset(4, 3, 3), config, state, sampling, noise),
      DomainError);
}

TEST(SgdConfigTest, ValidateChecksNoiseAndRate) {
  SgdConfig config;
  EXPECT_NO_THROW(config.Validate(false));
  config.sigma_g = 0.0;
  EXPECT_THROW(config.Validate(false), DomainError);
  EXPECT_NO_THROW(config.Validate(true));
  config = SgdConfig();
  config.learning_rate = 0.0;
  EXPECT_THROW(config.Validate(false), DomainError);
}

}  // namespace
}  // namespace dpgm
