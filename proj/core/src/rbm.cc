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

#include "dpgm/rbm.h"

#include <cmath>
#include <string>
#include <vector>

#include "dpgm/errors.h"

namespace dpgm {
namespace {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Derived>
auto Logistic(const Eigen::ArrayBase<Derived>& x) {
  return 1.0 / (1.0 + (-x).exp());
}

// Replaces every probability with a Bernoulli draw, row by row.
void SampleInPlace(Eigen::MatrixXd& probabilities, Rng& rng) {
  for (Eigen::Index r = 0; r < probabilities.rows(); ++r) {
    for (Eigen::Index c = 0; c < probabilities.cols(); ++c) {
      probabilities(r, c) = Uniform01(rng) < probabilities(r, c) ? 1.0 : 0.0;
    }
  }
}

// Rows of `visible` -> hidden probabilities, one row per state.
Eigen::MatrixXd HiddenProbabilityRows(const RbmModel& model,
                                      const Eigen::MatrixXd& visible) {
  Eigen::MatrixXd pre = visible * model.weights.transpose();
  pre.rowwise() += model.hidden_bias.transpose();
  return Logistic(pre.array()).matrix();
}

Eigen::MatrixXd VisibleProbabilityRows(const RbmModel& model,
                                       const Eigen::MatrixXd& hidden) {
  Eigen::MatrixXd pre = hidden * model.weights;
  pre.rowwise() += model.visible_bias.transpose();
  return Logistic(pre.array()).matrix();
}

void GibbsSweeps(const RbmModel& model, Eigen::MatrixXd& states, int sweeps,
                 Rng& rng) {
  for (int s = 0; s < sweeps; ++s) {
    Eigen::MatrixXd hidden = HiddenProbabilityRows(model, states);
    SampleInPlace(hidden, rng);
    states = VisibleProbabilityRows(model, hidden);
    SampleInPlace(states, rng);
  }
}

Eigen::MatrixXd BernoulliHalf(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd states(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      states(r, c) = Uniform01(rng) < 0.5 ? 1.0 : 0.0;
    }
  }
  return states;
}

BinaryRecord ToRecord(const Eigen::RowVectorXd& row) {
  std::vector<std::uint8_t> bits(row.size());
  for (Eigen::Index j = 0; j < row.size(); ++j) bits[j] = row[j] > 0.5;
  return BinaryRecord(std::move(bits));
}

void CheckVisible(const RbmModel& model, Eigen::Index size) {
  if (size != model.visible_units()) {
    throw DomainError("visible vector has dimension " + std::to_string(size) +
                      ", model expects " +
                      std::to_string(model.visible_units()));
  }
}

}  // namespace

RbmModel::RbmModel(int visible, int hidden)
    : weights(Eigen::MatrixXd::Zero(hidden, visible)),
      visible_bias(Eigen::VectorXd::Zero(visible)),
      hidden_bias(Eigen::VectorXd::Zero(hidden)) {
  if (visible < 1 || hidden < 1) {
    throw DomainError("RBM needs at least one visible and one hidden unit");
  }
}

Eigen::Index RbmModel::ParameterCount() const {
  return weights.size() + visible_bias.size() + hidden_bias.size();
}

Eigen::VectorXd RbmModel::Flatten() const {
  Eigen::VectorXd out(ParameterCount());
  const Eigen::Index n = hidden_units();
  const Eigen::Index m = visible_units();
  Eigen::Map<RowMajorMatrix>(out.data(), n, m) = weights;
  out.segment(n * m, m) = visible_bias;
  out.segment(n * m + m, n) = hidden_bias;
  return out;
}

void RbmModel::Unflatten(const Eigen::VectorXd& parameters) {
  if (parameters.size() != ParameterCount()) {
    throw DomainError("parameter vector has the wrong length");
  }
  const Eigen::Index n = hidden_units();
  const Eigen::Index m = visible_units();
  weights = Eigen::Map<const RowMajorMatrix>(parameters.data(), n, m);
  visible_bias = parameters.segment(n * m, m);
  hidden_bias = parameters.segment(n * m + m, n);
}

bool RbmModel::AllFinite() const {
  return weights.allFinite() && visible_bias.allFinite() &&
         hidden_bias.allFinite();
}

RbmModel RandomRbm(int visible, int hidden, double weight_stddev, Rng& rng) {
  RbmModel model(visible, hidden);
  for (int i = 0; i < hidden; ++i) {
    for (int j = 0; j < visible; ++j) {
      model.weights(i, j) = GaussianNoise(rng, weight_stddev);
    }
  }
  return model;
}

double Energy(const RbmModel& model, const Eigen::VectorXd& v,
              const Eigen::VectorXd& h) {
  CheckVisible(model, v.size());
  if (h.size() != model.hidden_units()) {
    throw DomainError("hidden vector has the wrong dimension");
  }
  return -v.dot(model.weights.transpose() * h) - model.visible_bias.dot(v) -
         model.hidden_bias.dot(h);
}

Eigen::VectorXd HiddenProbabilities(const RbmModel& model,
                                    const Eigen::VectorXd& v) {
  CheckVisible(model, v.size());
  return Logistic((model.weights * v + model.hidden_bias).array()).matrix();
}

Eigen::VectorXd VisibleProbabilities(const RbmModel& model,
                                     const Eigen::VectorXd& h) {
  if (h.size() != model.hidden_units()) {
    throw DomainError("hidden vector has the wrong dimension");
  }
  return Logistic((model.weights.transpose() * h + model.visible_bias).array())
      .matrix();
}

Eigen::VectorXd PositiveStatistic(const RbmModel& model,
                                  const Eigen::VectorXd& v) {
  const Eigen::VectorXd p = HiddenProbabilities(model, v);
  const Eigen::Index n = model.hidden_units();
  const Eigen::Index m = model.visible_units();
  Eigen::VectorXd out(model.ParameterCount());
  Eigen::Map<RowMajorMatrix>(out.data(), n, m) = p * v.transpose();
  out.segment(n * m, m) = v;
  out.segment(n * m + m, n) = p;
  return out;
}

PersistentChains::PersistentChains(int count, int visible, std::uint64_t seed)
    : rng_(seed) {
  if (count < 1) throw DomainError("need at least one persistent chain");
  states_ = BernoulliHalf(count, visible, rng_);
}

void PersistentChains::Advance(const RbmModel& model, int sweeps) {
  CheckVisible(model, states_.cols());
  GibbsSweeps(model, states_, sweeps, rng_);
}

Eigen::VectorXd PersistentChains::NegativeStatistic(
    const RbmModel& model) const {
  CheckVisible(model, states_.cols());
  const Eigen::Index n = model.hidden_units();
  const Eigen::Index m = model.visible_units();
  const double count = static_cast<double>(states_.rows());
  const Eigen::MatrixXd hidden = HiddenProbabilityRows(model, states_);
  Eigen::VectorXd out(model.ParameterCount());
  Eigen::Map<RowMajorMatrix>(out.data(), n, m) =
      hidden.transpose() * states_ / count;
  out.segment(n * m, m) = states_.colwise().mean().transpose();
  out.segment(n * m + m, n) = hidden.colwise().mean().transpose();
  return out;
}

Eigen::MatrixXd PcdPerExampleGradients(const RbmModel& model,
                                       const Batch& batch,
                                       PersistentChains& chains,
                                       int gibbs_steps) {
  if (gibbs_steps < 1) throw DomainError("gibbs_steps must be at least 1");
  if (batch.empty()) return Eigen::MatrixXd(model.ParameterCount(), 0);
  const Eigen::MatrixXd x = batch.ToMatrix();
  CheckVisible(model, x.cols());

  chains.Advance(model, gibbs_steps);
  const Eigen::VectorXd negative = chains.NegativeStatistic(model);

  const Eigen::Index n = model.hidden_units();
  const Eigen::Index m = model.visible_units();
  const Eigen::MatrixXd hidden = HiddenProbabilityRows(model, x);
  Eigen::MatrixXd gradients(model.ParameterCount(), x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    double* column = gradients.col(r).data();
    Eigen::Map<RowMajorMatrix>(column, n, m) =
        hidden.row(r).transpose() * x.row(r);
    gradients.col(r).segment(n * m, m) = x.row(r).transpose();
    gradients.col(r).segment(n * m + m, n) = hidden.row(r).transpose();
  }
  gradients.colwise() -= negative;
  return gradients;
}

BinaryRecord SampleRbm(const RbmModel& model, int gibbs_steps, Rng& rng) {
  return SampleRbmBatch(model, 1, gibbs_steps, rng).front();
}

std::vector<BinaryRecord> SampleRbmBatch(const RbmModel& model, int count,
                                         int gibbs_steps, Rng& rng) {
  if (gibbs_steps < 1) throw DomainError("gibbs_steps must be at least 1");
  std::vector<BinaryRecord> out;
  if (count <= 0) return out;
  Eigen::MatrixXd states = BernoulliHalf(count, model.visible_units(), rng);
  GibbsSweeps(model, states, gibbs_steps, rng);
  out.reserve(count);
  for (int r = 0; r < count; ++r) out.push_back(ToRecord(states.row(r)));
  return out;
}

RbmTrainer::RbmTrainer(RbmModel model, PersistentChains chains, int gibbs_steps)
    : model_(std::move(model)),
      chains_(std::move(chains)),
      gibbs_steps_(gibbs_steps) {
  if (gibbs_steps_ < 1) throw DomainError("gibbs_steps must be at least 1");
}

void RbmTrainer::SetParameters(const Eigen::VectorXd& parameters) {
  model_.Unflatten(parameters);
}

Eigen::MatrixXd RbmTrainer::PerExampleLossGradients(const Batch& batch) {
  return -PcdPerExampleGradients(model_, batch, chains_, gibbs_steps_);
}

nlohmann::json ToJson(const RbmModel& model) {
  const Eigen::VectorXd flat = model.Flatten();
  const Eigen::Index n = model.hidden_units();
  const Eigen::Index m = model.visible_units();
  return {
      {"hidden", n},
      {"visible", m},
      {"W", std::vector<double>(flat.data(), flat.data() + n * m)},
      {"b", std::vector<double>(model.visible_bias.data(),
                                model.visible_bias.data() + m)},
      {"c", std::vector<double>(model.hidden_bias.data(),
                                model.hidden_bias.data() + n)},
  };
}

RbmModel RbmFromJson(const nlohmann::json& j) {
  const int n = j.at("hidden").get<int>();
  const int m = j.at("visible").get<int>();
  RbmModel model(m, n);
  const auto w = j.at("W").get<std::vector<double>>();
  const auto b = j.at("b").get<std::vector<double>>();
  const auto c = j.at("c").get<std::vector<double>>();
  if (w.size() != static_cast<std::size_t>(n) * m ||
      b.size() != static_cast<std::size_t>(m) ||
      c.size() != static_cast<std::size_t>(n)) {
    throw ValidationError("RBM parameter arrays have inconsistent sizes");
  }
  model.weights = Eigen::Map<const RowMajorMatrix>(w.data(), n, m);
  model.visible_bias = Eigen::Map<const Eigen::VectorXd>(b.data(), m);
  model.hidden_bias = Eigen::Map<const Eigen::VectorXd>(c.data(), n);
  if (!model.AllFinite()) {
    throw ValidationError("RBM parameters must be finite");
  }
  return model;
}

}  // namespace dpgm
