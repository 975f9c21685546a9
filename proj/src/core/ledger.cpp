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

#include "core/ledger.hpp"

#include "core/error.hpp"

namespace gdir {

GoalLedger::GoalLedger(std::vector<LedgerGoal> goals) : goals_(std::move(goals)) {
  for (std::size_t i = 0; i < goals_.size(); ++i) {
    if (!index_.emplace(goals_[i].id, i).second)
      fail(ErrorCode::Validation, "duplicate goal id '" + goals_[i].id + "' in ledger");
  }
  rebuild_pending();
}

bool GoalLedger::contains(const std::string& goal_id) const { return index_.count(goal_id) > 0; }

const LedgerGoal& GoalLedger::goal(const std::string& goal_id) const {
  auto it = index_.find(goal_id);
  if (it == index_.end()) fail(ErrorCode::InvalidArgument, "unknown goal id '" + goal_id + "'");
  return goals_[it->second];
}

const Verdict* GoalLedger::latest_verdict(const std::string& goal_id) const {
  auto it = verdicts_.find(goal_id);
  return it == verdicts_.end() ? nullptr : &it->second;
}

void GoalLedger::rebuild_pending() {
  pending_.clear();
  for (const auto& g : goals_)
    if (!completed_.count(g.id)) pending_.push_back(g.id);
}

GoalLedger GoalLedger::apply(std::span<const Verdict> verdicts) const {
  for (const auto& v : verdicts)
    if (!contains(v.goal_id))
      fail(ErrorCode::InvalidArgument, "verdict for unknown goal id '" + v.goal_id + "'");

  GoalLedger next = *this;
  for (const auto& v : verdicts) {
    if (v.satisfied)
      next.completed_.insert(v.goal_id);
    else
      next.completed_.erase(v.goal_id);
    next.verdicts_[v.goal_id] = v;
  }
  next.rebuild_pending();
  return next;
}

GoalLedger ledger_new(const Task& task) {
  auto report = validate_task(task);
  if (!report.ok()) fail(ErrorCode::Validation, "invalid task '" + task.id + "': " + report.summary());
  std::vector<LedgerGoal> goals;
  goals.reserve(task.goals.size());
  for (const auto& g : task.goals) goals.push_back({g.id, g.goal_type, g.tag});
  return GoalLedger(std::move(goals));
}

GoalLedger ledger_apply(const GoalLedger& ledger, std::span<const Verdict> verdicts) {
  return ledger.apply(verdicts);
}

}  // namespace gdir
