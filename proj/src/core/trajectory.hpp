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
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "core/actions.hpp"
#include "core/backends.hpp"
#include "core/ledger.hpp"

namespace gdir {

enum class GateDecision { OneShot, Staged };
enum class StopReason { None, AllSatisfied, Budget, SelfQuery, SinglePass, Error };

std::string_view to_string(GateDecision g);
std::string_view to_string(StopReason r);
std::optional<GateDecision> gate_from_string(std::string_view s);
std::optional<StopReason> stop_reason_from_string(std::string_view s);

struct StepRecord {
  int iteration = 0;  // 1-based
  Directive directive;
  bool reprompted = false;
  std::optional<std::string> base_image;
  std::vector<std::uint64_t> candidate_seeds;
  std::vector<double> judge_scores;
  int chosen_index = -1;
  std::string chosen_image;
  std::vector<Verdict> verdicts;  // raw verifier output on the chosen candidate
  int coverage = 0;               // effective-satisfied count of the chosen candidate
  int best_coverage = 0;          // after the accept/rollback decision
  bool rollback = false;
  std::vector<std::string> pending_after;
  std::vector<std::string> completed_after;
  std::vector<Decision> decisions;
  std::optional<std::string> error;  // set when the step failed in a backend
};

// Ordered, replayable log of one task run.
struct Trajectory {
  std::string task_id;
  Modality modality = Modality::T2I;
  GateDecision gate = GateDecision::Staged;
  std::vector<LedgerGoal> goals;
  std::vector<StepRecord> steps;
  std::string final_image;
  StopReason stop_reason = StopReason::None;
  int iterations = 0;
  int editor_calls = 0;
  int final_coverage = 0;
  double confidence_threshold = 0.81;
  std::vector<Verdict> final_verdicts;  // raw verdicts on the final image
};

std::string step_to_json(const StepRecord& step);
std::string terminal_to_json(const Trajectory& traj);

// Parses a JSONL trajectory file produced by TrajectoryWriter. A file without
// a terminal record (aborted process) yields stop_reason None.
Trajectory parse_trajectory(std::string_view jsonl);
Trajectory read_trajectory(const std::filesystem::path& path);

// Appends one JSON line per record and flushes after each, so an aborted run
// leaves every completed step on disk.
class TrajectoryWriter {
 public:
  explicit TrajectoryWriter(const std::filesystem::path& path);
  void write_step(const StepRecord& step);
  void write_terminal(const Trajectory& traj);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace gdir
