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

#include "core/backends.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "core/trajectory.hpp"

namespace gdir {
namespace {

constexpr std::array<std::string_view, 3> kModeNames = {"full_compose", "local_edit", "regenerate"};

std::vector<std::string> ids_of(std::span<const Goal> goals) {
  std::vector<std::string> ids;
  ids.reserve(goals.size());
  for (const auto& g : goals) ids.push_back(g.id);
  return ids;
}

bool same_ids(std::vector<std::string> a, std::vector<std::string> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

void check_directive(const Directive& d, std::span<const Goal> goals, const char* who) {
  if (d.addressed_goal_ids != ids_of(goals))
    fail(ErrorCode::Backend, std::string(who) + " returned a directive for the wrong goals");
  if (d.text.empty()) fail(ErrorCode::Backend, std::string(who) + " returned an empty directive");
  if (d.mode == DirectiveMode::LocalEdit && (d.addressed_goal_ids.empty() || d.addressed_goal_ids.size() > 2))
    fail(ErrorCode::Backend, "local edits address one or two goals");
}

}  // namespace

bool ExtractedPlan::has_conflict() const {
  return std::any_of(goals.begin(), goals.end(), [](const Goal& g) { return g.conflict; });
}

std::string_view to_string(DirectiveMode m) { return kModeNames[static_cast<std::size_t>(m)]; }

std::optional<DirectiveMode> directive_mode_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kModeNames.size(); ++i)
    if (kModeNames[i] == s) return static_cast<DirectiveMode>(i);
  return std::nullopt;
}

ExtractedPlan plan_goals(Planner& planner, std::string_view instruction,
                         const std::optional<std::string>& source_image) {
  if (instruction.empty()) fail(ErrorCode::InvalidArgument, "empty instruction");
  auto plan = planner.plan_goals(instruction, source_image);
  if (!(plan.one_shot_feasibility >= 0.0 && plan.one_shot_feasibility <= 1.0))
    fail(ErrorCode::Backend, "planner returned one-shot feasibility outside [0, 1]");
  for (const auto& g : plan.goals)
    if (g.text.empty() || instruction.find(g.text) == std::string_view::npos)
      fail(ErrorCode::Backend, "planner returned a non-verbatim goal: '" + g.text + "'");
  return plan;
}

Directive propose_directive(Planner& planner, const GoalLedger& ledger, std::span<const Goal> batch,
                            const Trajectory& history, int template_id) {
  if (batch.empty()) fail(ErrorCode::InvalidArgument, "empty batch");
  if (batch.size() > 2) fail(ErrorCode::InvalidArgument, "batch size exceeds 2");
  for (const auto& g : batch) {
    if (!ledger.contains(g.id)) fail(ErrorCode::InvalidArgument, "unknown goal id '" + g.id + "'");
    if (ledger.is_completed(g.id)) fail(ErrorCode::InvalidArgument, "goal '" + g.id + "' is not pending");
  }
  auto d = planner.propose_directive(ledger, batch, history, template_id);
  check_directive(d, batch, "planner");
  return d;
}

Directive reprompt(Planner& planner, std::span<const Goal> failed_batch, const Directive& previous,
                   const Trajectory& history) {
  if (failed_batch.empty()) fail(ErrorCode::InvalidArgument, "empty batch");
  if (!same_ids(previous.addressed_goal_ids, ids_of(failed_batch)))
    fail(ErrorCode::InvalidArgument, "previous directive addressed different goals");
  if (!has_failed_attempt(history, failed_batch))
    fail(ErrorCode::InvalidArgument, "reprompt requires a prior failed attempt on the batch");
  auto d = planner.reprompt(failed_batch, previous, history);
  check_directive(d, failed_batch, "planner");
  if (d.text == previous.text) fail(ErrorCode::Backend, "reprompt repeated the failed directive");
  return d;
}

std::vector<std::uint64_t> derive_candidate_seeds(std::uint64_t seed_key, int n) {
  std::vector<std::uint64_t> seeds;
  std::set<std::uint64_t> seen;
  for (int i = 0; i < n; ++i) {
    auto s = mix(seed_key, static_cast<std::uint64_t>(i));
    while (!seen.insert(s).second) s = splitmix64(s);
    seeds.push_back(s);
  }
  return seeds;
}

std::vector<Candidate> generate_candidates(Editor& editor, const Directive& directive, int n,
                                           const std::optional<Image>& base, std::uint64_t seed_key) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "candidate count must be at least 1");
  if (directive.mode == DirectiveMode::LocalEdit && !base)
    fail(ErrorCode::InvalidArgument, "local edits need a base image");
  const auto seeds = derive_candidate_seeds(seed_key, n);
  auto candidates = editor.render(directive, base, seeds);
  if (candidates.size() != static_cast<std::size_t>(n))
    fail(ErrorCode::Backend, "editor returned " + std::to_string(candidates.size()) + " candidates, expected " +
                                 std::to_string(n));
  for (int i = 0; i < n; ++i)
    if (candidates[i].seed != seeds[i]) fail(ErrorCode::Backend, "editor did not honour candidate seeds");
  return candidates;
}

std::size_t judge_select(Judge& judge, std::vector<Candidate>& candidates, std::span<const Goal> goals_in_scope) {
  if (candidates.empty()) fail(ErrorCode::InvalidArgument, "no candidates to judge");
  auto scores = judge.score(candidates, goals_in_scope);
  if (scores.size() != candidates.size()) fail(ErrorCode::Backend, "judge returned the wrong number of scores");
  std::size_t best = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!(scores[i] >= 0.0 && scores[i] <= 5.0)) fail(ErrorCode::Backend, "judge score outside [0, 5]");
    candidates[i].judge_score = scores[i];
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

std::vector<Verdict> verify(Verifier& verifier, const Image& image, std::span<const Goal> goals) {
  if (goals.empty()) fail(ErrorCode::InvalidArgument, "nothing to verify");
  auto verdicts = verifier.evaluate(image, goals);
  if (verdicts.size() != goals.size()) fail(ErrorCode::Backend, "verifier returned the wrong number of verdicts");
  for (std::size_t i = 0; i < goals.size(); ++i) {
    if (verdicts[i].goal_id != goals[i].id) fail(ErrorCode::Backend, "verifier returned verdicts out of order");
    if (!(verdicts[i].confidence >= 0.0 && verdicts[i].confidence <= 1.0))
      fail(ErrorCode::Backend, "verifier confidence outside [0, 1]");
  }
  return verdicts;
}

DirectiveMode choose_mode(const GoalLedger& ledger, std::span<const Goal> batch, bool has_base) {
  if (!has_base) return DirectiveMode::FullCompose;
  for (const auto& g : batch) {
    if (g.tag != GoalTag::Global && g.tag != GoalTag::Layout) continue;
    if (const auto* v = ledger.latest_verdict(g.id); v && !v->satisfied) return DirectiveMode::Regenerate;
  }
  return DirectiveMode::LocalEdit;
}

void flag_conflicts(std::vector<Goal>& goals) {
  struct Shape {
    std::string skeleton;
    std::vector<std::string> params;
  };
  std::vector<Shape> shapes;
  for (const auto& g : goals) {
    Shape s;
    std::istringstream words(g.text);
    std::string w;
    while (words >> w) {
      const bool param = std::any_of(w.begin(), w.end(), [](unsigned char c) { return std::isdigit(c); });
      if (param) s.params.push_back(w);
      s.skeleton += (param ? std::string("#") : w) + ' ';
    }
    shapes.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < goals.size(); ++i) {
    for (std::size_t j = i + 1; j < goals.size(); ++j) {
      if (goals[i].goal_type != goals[j].goal_type) continue;
      if (shapes[i].params.empty() || shapes[i].skeleton != shapes[j].skeleton) continue;
      if (shapes[i].params != shapes[j].params) goals[i].conflict = goals[j].conflict = true;
    }
  }
}

std::string directive_text(int template_id, DirectiveMode mode, std::span<const Goal> goals) {
  std::string body;
  for (std::size_t i = 0; i < goals.size(); ++i) {
    if (i) body += (goals.size() == 2 ? " and " : "; ");
    body += goals[i].text;
  }
  const bool compose = mode == DirectiveMode::FullCompose;
  switch (((template_id % 3) + 3) % 3) {
    case 0:
      return (compose ? "Compose the scene: " : "Edit the image: ") + body;
    case 1:
      return "Focus on this change: " + body + (compose ? "" : ", keeping everything else unchanged");
    default:
      return (compose ? "Render one image that shows: " : "Revise the image so that it shows: ") + body;
  }
}

bool has_failed_attempt(const Trajectory& history, std::span<const Goal> batch) {
  const auto ids = ids_of(batch);
  for (const auto& step : history.steps) {
    if (!same_ids(step.directive.addressed_goal_ids, ids)) continue;
    if (step.rollback || step.error) return true;
    for (const auto& id : ids)
      if (std::find(step.pending_after.begin(), step.pending_after.end(), id) != step.pending_after.end())
        return true;
  }
  return false;
}

}  // namespace gdir
