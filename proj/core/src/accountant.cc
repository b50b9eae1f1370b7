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

#include "dpgm/accountant.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dpgm/errors.h"

namespace dpgm {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Streaming log(sum(exp(v_i))).
class LogSumExp {
 public:
  void Add(double v) {
    if (v == kNegInf) return;
    if (v <= max_) {
      sum_ += std::exp(v - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - v) + 1.0;
      max_ = v;
    }
  }
  double Value() const {
    return max_ == kNegInf ? kNegInf : max_ + std::log(sum_);
  }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
};

double LogAddExp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// log(mu1(x) / mu0(x)) = log(1 - q + q exp((2x - 1) / (2 sigma^2))).
double LogLikelihoodRatio(double x, double sigma, double q) {
  const double r = (2.0 * x - 1.0) / (2.0 * sigma * sigma);
  if (q == 1.0) return r;
  if (r > 0.0) {
    return std::log(q) + r + std::log1p((1.0 - q) / q * std::exp(-r));
  }
  return std::log1p(q * std::expm1(r));
}

struct LogMoments {
  double e1 = kNegInf;
  double e2 = kNegInf;
};

// Composite Simpson on [lo, hi], refined by interval doubling. Points from
// coarser levels are reused: at every level the Simpson sum is
// h/3 (ends + 4 * newest midpoints + 2 * all older interior points).
class SimpsonLogMoments {
 public:
  SimpsonLogMoments(double lambda, double sigma, double q, double lo, double hi)
      : lambda_(lambda), sigma_(sigma), q_(q), lo_(lo), hi_(hi) {
    log_norm_ = -std::log(sigma * std::sqrt(2.0 * std::numbers::pi));
    AddPoint(lo, ends_e1_, ends_e2_);
    AddPoint(hi, ends_e1_, ends_e2_);
  }

  // Advances to 2^level intervals and returns the estimate there.
  LogMoments Refine() {
    ++level_;
    const double intervals = std::ldexp(1.0, level_);
    const double h = (hi_ - lo_) / intervals;
    LogSumExp mid_e1, mid_e2;
    const long long count = 1LL << (level_ - 1);
    for (long long i = 0; i < count; ++i) {
      AddPoint(lo_ + (2 * i + 1) * h, mid_e1, mid_e2);
    }
    const double log_w = std::log(h / 3.0);
    LogMoments out;
    out.e1 = log_w + Combine(ends_e1_, mid_e1, interior_e1_);
    out.e2 = log_w + Combine(ends_e2_, mid_e2, interior_e2_);
    interior_e1_.Add(mid_e1.Value());
    interior_e2_.Add(mid_e2.Value());
    return out;
  }

  int level() const { return level_; }

 private:
  static double Combine(const LogSumExp& ends, const LogSumExp& mids,
                        const LogSumExp& interior) {
    double total = ends.Value();
    total = LogAddExp(total, std::log(4.0) + mids.Value());
    total = LogAddExp(total, std::log(2.0) + interior.Value());
    return total;
  }

  void AddPoint(double x, LogSumExp& e1, LogSumExp& e2) const {
    const double log_mu0 = log_norm_ - x * x / (2.0 * sigma_ * sigma_);
    const double ratio = LogLikelihoodRatio(x, sigma_, q_);
    e1.Add(log_mu0 - lambda_ * ratio);
    e2.Add(log_mu0 + (lambda_ + 1.0) * ratio);
  }

  double lambda_, sigma_, q_, lo_, hi_;
  double log_norm_ = 0.0;
  int level_ = 0;
  LogSumExp ends_e1_, ends_e2_;
  LogSumExp interior_e1_, interior_e2_;
};

bool Converged(double previous, double current, double tolerance) {
  return std::abs(std::expm1(current - previous)) < tolerance;
}

void CheckSigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("noise scale must be positive, got " +
                      std::to_string(sigma));
  }
}

void CheckLambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("lambda must be positive, got " + std::to_string(lambda));
  }
}

}  // namespace

std::vector<SplitPair> DefaultSplitGrid() {
  std::vector<SplitPair> grid;
  for (int i = 1; i <= 10; ++i) {
    const double j1 = 0.05 * i;
    grid.push_back({j1, 1.0 - j1});
  }
  return grid;
}

void PrivacyConfig::Validate() const {
  CheckSigma(sigma_c);
  CheckSigma(sigma_k);
  CheckSigma(sigma_g);
  if (!(q > 0.0 && q <= 1.0)) {
    throw DomainError("sampling probability q must lie in (0, 1]");
  }
  if (t_k < 0 || t_s < 0) throw DomainError("iteration counts must be >= 0");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("delta must lie in (0, 1)");
  }
  if (lambda_max < 1) throw DomainError("lambda_max must be at least 1");
  if (j_grid.empty()) throw DomainError("split grid must not be empty");
  for (const auto& split : j_grid) {
    if (!(split.first > 0.0 && split.second > 0.0) ||
        std::abs(split.first + split.second - 1.0) > 1e-12) {
      throw DomainError("split weights must be positive and sum to 1");
    }
  }
}

std::int64_t SgdIterationsForEpochs(double epochs, double q) {
  if (!(q > 0.0 && q <= 1.0)) {
    throw DomainError("sampling probability q must lie in (0, 1]");
  }
  if (epochs < 0.0) throw DomainError("epochs must be non-negative");
  const double per_epoch = std::ceil(1.0 / q);
  return static_cast<std::int64_t>(std::llround(epochs * per_epoch));
}

double AlphaGaussian(double lambda, double sigma, bool strict_gaussian) {
  CheckSigma(sigma);
  CheckLambda(lambda);
  const double denominator = (strict_gaussian ? 2.0 : 4.0) * sigma * sigma;
  return (lambda * lambda + lambda) / denominator;
}

double AlphaSubsampledGaussian(double lambda, double sigma, double q,
                               const QuadratureOptions& options) {
  CheckSigma(sigma);
  CheckLambda(lambda);
  if (!(q >= 0.0 && q <= 1.0)) {
    throw DomainError("sampling probability q must lie in [0, 1]");
  }
  if (q == 0.0) return 0.0;

  // Both integrands are Gaussian-like bumps; with q = 1 they sit at -lambda
  // and lambda + 1, so the window grows with lambda.
  const double margin = std::max(20.0 * sigma, 20.0) + lambda;
  SimpsonLogMoments simpson(lambda, sigma, q, -margin, 1.0 + margin);

  LogMoments previous;
  while (simpson.level() < options.initial_log2_points) {
    previous = simpson.Refine();
  }
  while (simpson.level() < options.max_log2_points) {
    const LogMoments current = simpson.Refine();
    if (Converged(previous.e1, current.e1, options.relative_tolerance) &&
        Converged(previous.e2, current.e2, options.relative_tolerance)) {
      if (!std::isfinite(current.e1) || !std::isfinite(current.e2)) break;
      return std::max(0.0, std::max(current.e1, current.e2));
    }
    previous = current;
  }
  throw NumericalError(
      "subsampled Gaussian quadrature did not converge (lambda=" +
      std::to_string(lambda) + ", sigma=" + std::to_string(sigma) +
      ", q=" + std::to_string(q) + ")");
}

double AlphaKMeans(double lambda, const PrivacyConfig& config) {
  if (config.t_k == 0) return 0.0;
  const bool strict = config.strict_gaussian;
  // Per iteration: noisy sizes and noisy sums, each a Gaussian mechanism
  // at scale sigma_k. Norm selection is charged per iteration unless the
  // RBF feature bound makes it unnecessary.
  double per_iteration = 2.0 * AlphaGaussian(lambda, config.sigma_k, strict);
  if (!config.rbf_mode) {
    per_iteration += AlphaGaussian(lambda, config.sigma_c, strict);
  }
  return static_cast<double>(config.t_k) * per_iteration;
}

double AlphaSgd(double lambda, const PrivacyConfig& config,
                std::span<const SplitPair> j_grid,
                const QuadratureOptions& options) {
  CheckLambda(lambda);
  if (j_grid.empty()) throw DomainError("split grid must not be empty");
  for (const auto& split : j_grid) {
    if (!(split.first > 0.0 && split.second > 0.0) ||
        std::abs(split.first + split.second - 1.0) > 1e-12) {
      throw DomainError("split weights must be positive and sum to 1");
    }
  }
  if (config.t_s == 0 || config.q == 0.0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& split : j_grid) {
    const double value = split.first * AlphaSubsampledGaussian(
                                           lambda / split.first, config.sigma_c,
                                           config.q, options) +
                         split.second * AlphaSubsampledGaussian(
                                            lambda / split.second,
                                            config.sigma_g, config.q, options);
    best = std::min(best, value);
  }
  return static_cast<double>(config.t_s) * best;
}

double AlphaSgd(double lambda, const PrivacyConfig& config) {
  return AlphaSgd(lambda, config, config.j_grid);
}

AlphaProfile ComputeAlphaProfile(const PrivacyConfig& config) {
  config.Validate();
  AlphaProfile profile;
  for (int lambda = 1; lambda <= config.lambda_max; ++lambda) {
    profile.lambda_grid.push_back(lambda);
    profile.kmeans.push_back(AlphaKMeans(lambda, config));
    profile.sgd.push_back(AlphaSgd(lambda, config));
  }
  return profile;
}

EpsilonResult EpsilonForProfile(const AlphaProfile& profile, double delta) {
  if (profile.lambda_grid.empty()) {
    throw DomainError("lambda grid must not be empty");
  }
  EpsilonResult best;
  best.delta = delta;
  best.epsilon = std::numeric_limits<double>::infinity();
  const double log_delta = std::log(delta);
  for (std::size_t i = 0; i < profile.lambda_grid.size(); ++i) {
    const double lambda = profile.lambda_grid[i];
    const double eps = (profile.total(i) - log_delta) / lambda;
    if (eps < best.epsilon) {
      best.epsilon = eps;
      best.lambda = profile.lambda_grid[i];
    }
  }
  return best;
}

EpsilonResult EpsilonForDelta(const PrivacyConfig& config) {
  return EpsilonForProfile(ComputeAlphaProfile(config), config.delta);
}

nlohmann::json ToJson(const PrivacyConfig& config) {
  nlohmann::json splits = nlohmann::json::array();
  for (const auto& split : config.j_grid) splits.push_back(split.first);
  return {
      {"sigma_c", config.sigma_c},
      {"sigma_k", config.sigma_k},
      {"sigma_g", config.sigma_g},
      {"q", config.q},
      {"t_k", config.t_k},
      {"t_s", config.t_s},
      {"delta", config.delta},
      {"rbf_mode", config.rbf_mode},
      {"lambda_max", config.lambda_max},
      {"strict_gaussian", config.strict_gaussian},
      {"j_grid", splits},
  };
}

PrivacyConfig PrivacyConfigFromJson(const nlohmann::json& j) {
  PrivacyConfig config;
  config.sigma_c = j.at("sigma_c").get<double>();
  config.sigma_k = j.at("sigma_k").get<double>();
  config.sigma_g = j.at("sigma_g").get<double>();
  config.q = j.at("q").get<double>();
  config.t_k = j.at("t_k").get<std::int64_t>();
  config.t_s = j.at("t_s").get<std::int64_t>();
  config.delta = j.at("delta").get<double>();
  config.rbf_mode = j.at("rbf_mode").get<bool>();
  config.lambda_max = j.at("lambda_max").get<int>();
  config.strict_gaussian = j.at("strict_gaussian").get<bool>();
  if (j.contains("j_grid")) {
    config.j_grid.clear();
    for (double j1 : j.at("j_grid")) config.j_grid.push_back({j1, 1.0 - j1});
  }
  return config;
}

nlohmann::json ToJson(const AlphaProfile& profile) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < profile.lambda_grid.size(); ++i) {
    rows.push_back({{"lambda", profile.lambda_grid[i]},
                    {"alpha_kmeans", profile.kmeans[i]},
                    {"alpha_sgd", profile.sgd[i]},
                    {"alpha_total", profile.total(i)}});
  }
  return rows;
}

nlohmann::json ToJson(const EpsilonResult& result) {
  return {{"epsilon", result.epsilon},
          {"delta", result.delta},
          {"lambda", result.lambda}};
}

}  // namespace dpgm
