// Copyright 2026 The goaldirector Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "core/actions.hpp"
#include "core/director.hpp"

namespace gdir {

// Linear softmax policy: logits = W * features / temperature, normalised over
// the legal actions of each decision.
struct PolicyParams {
  Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(kActionCount, kFeatureCount);
  double temperature = 1.0;

  // Imitates the built-in heuristic: staged batches in tag order, compose
  // everything when the one-shot gate is open, keep refining.
  static PolicyParams reference();
  bool finite() const { return weights.allFinite() && std::isfinite(temperature) && temperature > 0; }
};

Eigen::VectorXd feature_vector(const Features& f);

// Probabilities over `legal`, in the same order.
Eigen::VectorXd legal_probs(const PolicyParams& params, const Features& f, std::span<const Action> legal);

// Argmax, ties to the earliest legal action.
class GreedyPolicy final : public DecisionPolicy {
 public:
  explicit GreedyPolicy(const PolicyParams& params) : params_(params) {}
  Action decide(const Decision& context) override;

 private:
  const PolicyParams& params_;
};

// Samples from the policy with a private keyed stream.
class SampledPolicy final : public DecisionPolicy {
 public:
  SampledPolicy(const PolicyParams& params, std::uint64_t seed) : params_(params), key_(seed) {}
  Action decide(const Decision& context) override;

 private:
  const PolicyParams& params_;
  std::uint64_t key_;
  std::uint64_t draws_ = 0;
};

std::string params_to_json(const PolicyParams& params, int epochs_done = 0);
PolicyParams params_from_json(std::string_view text, int* epochs_done = nullptr);
void save_params(const std::filesystem::path& path, const PolicyParams& params, int epochs_done = 0);
PolicyParams load_params(const std::filesystem::path& path, int* epochs_done = nullptr);

}  // namespace gdir
