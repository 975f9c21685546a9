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

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "core/task.hpp"

namespace gdir {

struct LedgerGoal {
  std::string id;
  GoalType goal_type = GoalType::AddObject;
  GoalTag tag = GoalTag::Local;

  bool operator==(const LedgerGoal&) const = default;
};

// Partition of a task's goals into pending (instruction order) and completed,
// with the latest verdict seen for each goal. Immutable: apply() returns a new
// ledger.
class GoalLedger {
 public:
  GoalLedger() = default;
  explicit GoalLedger(std::vector<LedgerGoal> goals);

  const std::vector<LedgerGoal>& goals() const { return goals_; }
  const std::vector<std::string>& pending() const { return pending_; }
  const std::set<std::string>& completed() const { return completed_; }
  const std::map<std::string, Verdict>& verdicts() const { return verdicts_; }

  bool contains(const std::string& goal_id) const;
  bool is_completed(const std::string& goal_id) const { return completed_.count(goal_id) > 0; }
  const LedgerGoal& goal(const std::string& goal_id) const;
  const Verdict* latest_verdict(const std::string& goal_id) const;

  // Satisfied verdicts complete their goal; unsatisfied ones return it to
  // pending, including goals that were completed before (regressions).
  GoalLedger apply(std::span<const Verdict> verdicts) const;

  bool operator==(const GoalLedger&) const = default;

 private:
  void rebuild_pending();

  std::vector<LedgerGoal> goals_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::string> pending_;
  std::set<std::string> completed_;
  std::map<std::string, Verdict> verdicts_;
};

// Throws Error{Validation} when the task violates a structural invariant.
GoalLedger ledger_new(const Task& task);
GoalLedger ledger_apply(const GoalLedger& ledger, std::span<const Verdict> verdicts);

}  // namespace gdir
