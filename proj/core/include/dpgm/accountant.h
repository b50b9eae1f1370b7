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

// Moments accountant for the clustering + SGD pipeline.
//
// Every mechanism is summarized by alpha(lambda), the log of the moment
// generating function of its privacy loss. Alphas of independently
// randomized mechanisms add; the two mechanisms that share a sampled batch
// inside one SGD step are combined with a Hoelder split (j1, j2). The final
// epsilon for a fixed delta is min over integer lambda of
// (alpha_total(lambda) - log delta) / lambda.

#ifndef DPGM_ACCOUNTANT_H_
#define DPGM_ACCOUNTANT_H_

#include <cstdint>
#include <nlohmann/json.hpp>
#include <span>
#include <vector>

namespace dpgm {

// A Hoelder split: both weights positive, summing to one. `first` weighs the
// norm-selection mechanism, `second` the gradient-noise mechanism.
struct SplitPair {
  double first = 0.5;
  double second = 0.5;
};

// j1 in {0.05, 0.10, ..., 0.50}.
std::vector<SplitPair> DefaultSplitGrid();

struct PrivacyConfig {
  double sigma_c = 4.0;   // norm-bound selection (DPNorm)
  double sigma_k = 40.0;  // k-means sizes and sums
  double sigma_g = 1.0;   // SGD gradient noise
  double q = 0.0017;      // per-record sampling probability of one SGD step
  std::int64_t t_k = 20;
  std::int64_t t_s = 0;
  double delta = 1e-5;
  bool rbf_mode = true;
  int lambda_max = 32;
  // Uses the derivation-exact Gaussian log-MGF lambda(lambda+1)/(2 sigma^2)
  // instead of (lambda^2+lambda)/(4 sigma^2).
  bool strict_gaussian = false;
  std::vector<SplitPair> j_grid = DefaultSplitGrid();

  // Throws DomainError.
  void Validate() const;
};

// Number of SGD steps in `epochs` passes: epochs * ceil(1/q).
std::int64_t SgdIterationsForEpochs(double epochs, double q);

struct QuadratureOptions {
  int initial_log2_points = 12;
  int max_log2_points = 24;
  double relative_tolerance = 1e-8;
};

// Log-MGF of the Gaussian mechanism with unit sensitivity.
double AlphaGaussian(double lambda, double sigma, bool strict_gaussian = false);

// Log-MGF of the Poisson-subsampled Gaussian mechanism, log max(E1, E2),
// with E1 = int mu0 (mu0/mu1)^lambda, E2 = int mu1 (mu1/mu0)^lambda,
// mu0 = N(0, sigma^2) and mu1 = (1-q) N(0, sigma^2) + q N(1, sigma^2).
// Non-integer lambda is allowed. Throws NumericalError when the quadrature
// does not converge.
double AlphaSubsampledGaussian(double lambda, double sigma, double q,
                               const QuadratureOptions& options = {});

// Clustering cost over t_k iterations.
double AlphaKMeans(double lambda, const PrivacyConfig& config);

// SGD cost over t_s steps, minimized over the split grid.
double AlphaSgd(double lambda, const PrivacyConfig& config,
                std::span<const SplitPair> j_grid,
                const QuadratureOptions& options = {});
double AlphaSgd(double lambda, const PrivacyConfig& config);

struct AlphaProfile {
  std::vector<int> lambda_grid;
  std::vector<double> kmeans;  // alpha_K per grid point
  std::vector<double> sgd;     // alpha_S per grid point

  double total(std::size_t i) const { return kmeans[i] + sgd[i]; }
};

AlphaProfile ComputeAlphaProfile(const PrivacyConfig& config);

struct EpsilonResult {
  double epsilon = 0.0;
  int lambda = 0;
  double delta = 0.0;
};

EpsilonResult EpsilonForProfile(const AlphaProfile& profile, double delta);
EpsilonResult EpsilonForDelta(const PrivacyConfig& config);

nlohmann::json ToJson(const PrivacyConfig& config);
PrivacyConfig PrivacyConfigFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const AlphaProfile& profile);
nlohmann::json ToJson(const EpsilonResult& result);

}  // namespace dpgm

#endif  // DPGM_ACCOUNTANT_H_
