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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/actions.hpp"
#include "core/backends.hpp"
#include "core/ledger.hpp"
#include "core/sim_world.hpp"
#include "core/trajectory.hpp"

namespace gdir {

struct Strategies {
  bool reprompting = true;
  bool best_of_n = true;
  bool refinement = true;  // off: a single composition pass, no loop
};

struct RunConfig {
  int max_iterations = 6;
  int microgrid_t2i = 4;
  int microgrid_i2i = 1;
  double confidence_threshold = 0.81;
  double one_shot_feasibility_gate = 0.7;
  int one_shot_goal_cap = 15;
  int self_query_cadence = 2;
  double self_query_threshold = 0.5;
  Strategies strategies;
  std::size_t max_in_flight = 4;
  std::uint64_t seed = 0;

  void validate() const;  // throws Error{Config}
  int candidates_for(Modality m) const;
};

// Pure in its inputs: feasibility, goal count and whether any conflict is flagged.
GateDecision gate_one_shot(double feasibility, std::size_t goal_count, bool has_conflict, const RunConfig& cfg);
GateDecision gate_one_shot(const ExtractedPlan& plan, const RunConfig& cfg);

// Tag precedence global, layout, local, text overlay; stable within a tag;
// neighbours of the same tag pair up.
std::vector<std::vector<Goal>> schedule_batches(std::span<const Goal> pending);

// Supplies planner decisions in place of the built-in heuristic. The input
// carries the state features and the legal actions; the answer must be legal.
class DecisionPolicy {
 public:
  virtual ~DecisionPolicy() = default;
  virtual Action decide(const Decision& context) = 0;
};

struct DirectorState {
  GoalLedger ledger;
  std::optional<Image> best_image;
  std::vector<Verdict> best_verdicts;  // raw verdicts on best_image
  int best_coverage = 0;
  int iteration = 0;
  GateDecision gate = GateDecision::Staged;
  bool last_rollback = false;
  std::vector<std::vector<std::string>> queue;  // batches of goal ids
  std::vector<std::string> deferred;            // rolled-back goals, oldest first
  Trajectory trajectory;
};

// What one iteration executes: either a composition over `goals` or a staged
// batch of one or two pending goals.
struct IterationPlan {
  std::vector<Goal> goals;
  bool compose = false;
  bool reprompt = false;  // rewrite the last failed directive for this batch
  int template_id = 0;
  std::vector<Decision> decisions;
};

IterationPlan next_plan(const DirectorState& state, const Task& task, const RunConfig& cfg,
                        DecisionPolicy* policy = nullptr);

DirectorState director_init(const Task& task, Backends& backends, const RunConfig& cfg);

// Reorders the batch queue from the pending goals, rolled-back goals last.
void rebuild_queue(DirectorState& state, const Task& task);

// Accepts the candidate when its filtered coverage is at least the best so
// far, otherwise keeps the previous best and requeues the batch at the back.
// Returns true on rollback.
bool apply_rollback(DirectorState& state, const Image& candidate, std::span<const Verdict> raw_verdicts,
                    std::span<const Verdict> effective, std::span<const std::string> batch_ids);

StepRecord execute_iteration(DirectorState& state, const Task& task, Backends& backends, const RunConfig& cfg,
                             const IterationPlan& plan);

struct StopCheck {
  bool stop = false;
  StopReason reason = StopReason::None;
  std::optional<Decision> self_query;
};

StopCheck should_stop(const DirectorState& state, const RunConfig& cfg, Planner& planner,
                      DecisionPolicy* policy = nullptr);

Features state_features(const DirectorState& state, const RunConfig& cfg);

Trajectory run_task(const Task& task, const RunConfig& cfg, Backends& backends, DecisionPolicy* policy = nullptr,
                    TrajectoryWriter* sink = nullptr);

// Re-executes recorded directives and candidate seeds against a fresh
// simulated world and returns the filtered coverage of the final image.
int replay_final_coverage(const Task& task, const Trajectory& traj, const SimConfig& sim, double threshold);

}  // namespace gdir
