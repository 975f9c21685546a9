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

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/ledger.hpp"
#include "core/task.hpp"
#include "core/trajectory.hpp"

namespace gdir {

inline constexpr double kDefaultConfidenceThreshold = 0.81;

// Verdicts below the threshold count as unsatisfied. The boundary passes.
std::vector<Verdict> filter_verdicts(std::span<const Verdict> verdicts,
                                     double threshold = kDefaultConfidenceThreshold);
int count_satisfied(std::span<const Verdict> verdicts);

enum class Label { Success, Partial, Failure };
std::string_view to_string(Label l);

struct TypeCount {
  int satisfied = 0;
  int total = 0;
  bool operator==(const TypeCount&) const = default;
};

struct TaskScore {
  std::string task_id;
  int effective_satisfied = 0;
  int total_goals = 0;
  double finish_fraction = 0.0;
  Label label = Label::Failure;
  std::array<TypeCount, 6> per_type{};  // indexed like kGoalTypes
  int iterations = 0;
  int editor_calls = 0;
};

Label label_for(int satisfied, int total);

// Scores the trajectory's final verdicts against the ledger's goal set.
TaskScore score_task(const GoalLedger& ledger, const Trajectory& traj,
                     double threshold = kDefaultConfidenceThreshold);
TaskScore score_task(const Trajectory& traj, double threshold = kDefaultConfidenceThreshold);

struct BenchReport {
  int tasks = 0;
  int satisfied = 0;
  int goals = 0;
  double finish = 0.0;        // pooled over goals
  double finish_macro = 0.0;  // mean of per-task fractions
  double success_rate = 0.0;
  int success = 0, partial = 0, failure = 0;
  std::array<TypeCount, 6> per_type{};
  std::array<std::optional<double>, 6> per_type_rate{};  // empty when a type never occurs
  double mean_iterations = 0.0;
  double median_iterations = 0.0;
  double mean_editor_calls = 0.0;
};

BenchReport aggregate(std::span<const TaskScore> scores);

std::string report_to_json(const BenchReport& r);
BenchReport report_from_json(std::string_view text);
std::string render_table(const BenchReport& r);

}  // namespace gdir
