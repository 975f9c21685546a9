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

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/actions.hpp"
#include "core/backends.hpp"
#include "core/director.hpp"
#include "core/policy.hpp"
#include "core/trajectory.hpp"

namespace gdir {

struct ActionToken {
  Action action = Action::Stop;
  Origin origin = Origin::Planner;
  bool masked = false;  // tool tokens never enter the loss
  Features features{};
  std::vector<Action> legal;
};

// Planner decisions become trainable tokens; judge picks, verdicts and the
// accept/rollback outcome become masked tool tokens, in execution order.
std::vector<ActionToken> encode_trajectory(const Trajectory& traj);

// 5 * filtered satisfied goals / total goals.
double reward_score(const Trajectory& traj, double threshold = 0.81);

// Group-relative advantages. With std_normalize the centred rewards are
// divided by (population std + 1e-8); a zero-variance group yields zeros.
std::vector<double> compute_advantages(std::span<const double> rewards, bool std_normalize = true);

struct Rollout {
  Trajectory trajectory;
  std::vector<ActionToken> tokens;
  double reward = 0.0;
};

struct RolloutGroup {
  std::string task_id;
  std::vector<Rollout> rollouts;
  std::vector<double> advantages;
};

struct ObjectiveResult {
  double value = 0.0;
  double surrogate = 0.0;  // clipped surrogate part
  double kl = 0.0;         // mean per-token KL to the reference
  Eigen::MatrixXd gradient;
};

ObjectiveResult grpo_objective(const PolicyParams& params, const PolicyParams& old_params,
                               const PolicyParams& ref_params, std::span<const RolloutGroup> groups,
                               double clip_eps, double beta);

struct RolloutOptions {
  bool greedy = false;
  bool std_normalize = true;
  std::size_t jobs = 1;
  double threshold = 0.81;
};

// G director runs of one task with the policy in charge of planner decisions.
// Rollout i uses seeds[i] for both the policy stream and candidate seeds.
RolloutGroup rollout_group(const PolicyParams& params, const Task& task, int G, const BackendFactory& factory,
                           const RunConfig& cfg, std::span<const std::uint64_t> seeds,
                           const RolloutOptions& opts = {});

struct TrainConfig {
  int group_size = 8;
  int epochs = 200;
  double step_size = 2.0;
  double clip_eps = 0.2;
  double beta = 0.01;
  std::uint64_t seed = 0;
  bool std_normalize = true;
  double temperature = 1.0;

  void validate() const;  // throws Error{Config}
};

struct EpochStats {
  int epoch = 0;
  double mean_reward = 0.0;
  double mean_iterations = 0.0;
  double kl = 0.0;
};

struct TrainResult {
  PolicyParams params;
  std::vector<EpochStats> history;
};

struct PolicyEval {
  double mean_reward = 0.0;
  double mean_iterations = 0.0;
  double mean_editor_calls = 0.0;
};

PolicyEval evaluate_policy(const PolicyParams& params, std::span<const Task> tasks, const BackendFactory& factory,
                           const RunConfig& cfg, std::size_t jobs = 1);

// Runs cfg.epochs epochs of sample, score, one ascent step. Resuming passes
// the saved params and history; numbering continues after the history.
// Aborts with Error{Diverged} when the mean reward stays below half its peak
// for ten consecutive epochs.
TrainResult train(const TrainConfig& cfg, std::span<const Task> suite, const BackendFactory& factory,
                  const RunConfig& run_cfg, std::optional<PolicyParams> start = std::nullopt,
                  std::vector<EpochStats> prior_history = {}, std::size_t jobs = 1,
                  const std::function<void(const EpochStats&)>& on_epoch = {});

std::string history_to_csv(std::span<const EpochStats> history);
std::vector<EpochStats> history_from_csv(std::string_view text);

}  // namespace gdir
