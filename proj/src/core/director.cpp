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

#include "core/director.hpp"

#include <algorithm>
#include <set>

#include "core/error.hpp"
#include "core/metrics.hpp"
#include "core/rng.hpp"
#include "core/sim_backends.hpp"

namespace gdir {
namespace {

int tag_rank(GoalTag t) {
  switch (t) {
    case GoalTag::Global:
      return 0;
    case GoalTag::Layout:
      return 1;
    case GoalTag::Local:
      return 2;
    default:
      return 3;
  }
}

Action batch_action(GoalTag t) {
  switch (t) {
    case GoalTag::Global:
      return Action::BatchGlobal;
    case GoalTag::Layout:
      return Action::BatchLayout;
    case GoalTag::Local:
      return Action::BatchLocal;
    default:
      return Action::BatchText;
  }
}

const Goal& goal_of(const Task& task, const std::string& id) {
  const Goal* g = task.find_goal(id);
  if (!g) fail(ErrorCode::NotFound, "unknown goal id '" + id + "'");
  return *g;
}

std::vector<Goal> goals_of(const Task& task, std::span<const std::string> ids) {
  std::vector<Goal> out;
  for (const auto& id : ids) out.push_back(goal_of(task, id));
  return out;
}

Action decide(DecisionPolicy* policy, Decision& d, Action heuristic) {
  d.action = policy ? policy->decide(d) : heuristic;
  if (std::find(d.legal.begin(), d.legal.end(), d.action) == d.legal.end())
    fail(ErrorCode::InvalidArgument, "policy chose illegal action '" + std::string(to_string(d.action)) + "'");
  return d.action;
}

Decision template_decision(const DirectorState& state, const RunConfig& cfg) {
  Decision d;
  d.kind = DecisionKind::Template;
  d.features = state_features(state, cfg);
  for (std::size_t t = 0; t < kTemplateCount; ++t) d.legal.push_back(template_action(static_cast<int>(t)));
  return d;
}

const Directive* last_attempt(const Trajectory& traj, std::span<const Goal> batch) {
  std::vector<std::string> ids;
  for (const auto& g : batch) ids.push_back(g.id);
  std::sort(ids.begin(), ids.end());
  for (auto it = traj.steps.rbegin(); it != traj.steps.rend(); ++it) {
    auto addressed = it->directive.addressed_goal_ids;
    std::sort(addressed.begin(), addressed.end());
    if (addressed == ids) return &it->directive;
  }
  return nullptr;
}

}  // namespace

void RunConfig::validate() const {
  auto unit = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) fail(ErrorCode::Config, std::string(name) + " must lie in [0, 1]");
  };
  if (max_iterations < 1) fail(ErrorCode::Config, "max_iterations must be at least 1");
  if (microgrid_t2i < 1 || microgrid_i2i < 1) fail(ErrorCode::Config, "micro-grid sizes must be at least 1");
  if (self_query_cadence < 1) fail(ErrorCode::Config, "self_query_cadence must be at least 1");
  if (one_shot_goal_cap < 0) fail(ErrorCode::Config, "one_shot_goal_cap must not be negative");
  if (max_in_flight < 1) fail(ErrorCode::Config, "max_in_flight must be at least 1");
  unit(confidence_threshold, "confidence_threshold");
  unit(one_shot_feasibility_gate, "one_shot_feasibility_gate");
  unit(self_query_threshold, "self_query_threshold");
}

int RunConfig::candidates_for(Modality m) const {
  if (!strategies.best_of_n) return 1;
  return m == Modality::T2I ? microgrid_t2i : microgrid_i2i;
}

GateDecision gate_one_shot(double feasibility, std::size_t goal_count, bool has_conflict, const RunConfig& cfg) {
  const bool ok = feasibility >= cfg.one_shot_feasibility_gate &&
                  goal_count <= static_cast<std::size_t>(cfg.one_shot_goal_cap) && !has_conflict;
  return ok ? GateDecision::OneShot : GateDecision::Staged;
}

GateDecision gate_one_shot(const ExtractedPlan& plan, const RunConfig& cfg) {
  return gate_one_shot(plan.one_shot_feasibility, plan.goals.size(), plan.has_conflict(), cfg);
}

std::vector<std::vector<Goal>> schedule_batches(std::span<const Goal> pending) {
  std::vector<Goal> sorted(pending.begin(), pending.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Goal& a, const Goal& b) { return tag_rank(a.tag) < tag_rank(b.tag); });
  std::vector<std::vector<Goal>> batches;
  for (std::size_t i = 0; i < sorted.size();) {
    if (i + 1 < sorted.size() && sorted[i + 1].tag == sorted[i].tag) {
      batches.push_back({sorted[i], sorted[i + 1]});
      i += 2;
    } else {
      batches.push_back({sorted[i]});
      ++i;
    }
  }
  return batches;
}

Features state_features(const DirectorState& state, const RunConfig& cfg) {
  Features f{};
  const auto n = static_cast<double>(std::max<std::size_t>(state.ledger.goals().size(), 1));
  f[0] = 1.0;
  for (const auto& id : state.ledger.pending()) f[1 + tag_rank(state.ledger.goal(id).tag)] += 1.0 / n;
  f[5] = static_cast<double>(state.iteration) / cfg.max_iterations;
  f[6] = state.last_rollback ? 1.0 : 0.0;
  f[7] = state.best_coverage / n;
  f[8] = state.gate == GateDecision::OneShot ? 1.0 : 0.0;
  return f;
}

void rebuild_queue(DirectorState& state, const Task& task) {
  const auto& pending = state.ledger.pending();
  const std::set<std::string> pending_set(pending.begin(), pending.end());
  std::erase_if(state.deferred, [&](const std::string& id) { return !pending_set.count(id); });
  const std::set<std::string> deferred_set(state.deferred.begin(), state.deferred.end());
  std::vector<Goal> fresh;
  for (const auto& id : pending)
    if (!deferred_set.count(id)) fresh.push_back(goal_of(task, id));
  const std::vector<Goal> later = goals_of(task, state.deferred);
  state.queue.clear();
  auto enqueue = [&](const std::vector<Goal>& goals) {
    for (const auto& batch : schedule_batches(goals)) {
      std::vector<std::string> ids;
      for (const auto& g : batch) ids.push_back(g.id);
      state.queue.push_back(std::move(ids));
    }
  };
  enqueue(fresh);
  enqueue(later);
}

DirectorState director_init(const Task& task, Backends& backends, const RunConfig& cfg) {
  DirectorState state;
  state.ledger = ledger_new(task);
  const auto plan = plan_goals(*backends.planner, task.instruction, task.source_image);
  state.gate = gate_one_shot(plan, cfg);
  auto& traj = state.trajectory;
  traj.task_id = task.id;
  traj.modality = task.modality;
  traj.gate = state.gate;
  traj.goals = state.ledger.goals();
  traj.confidence_threshold = cfg.confidence_threshold;
  if (auto source = backends.editor->source_image()) {
    // The source photo may already satisfy some goals; measure it so later
    // edits that damage it are rolled back.
    const auto verdicts = verify(*backends.verifier, *source, task.goals);
    const auto effective = filter_verdicts(verdicts, cfg.confidence_threshold);
    state.ledger = ledger_apply(state.ledger, effective);
    state.best_coverage = count_satisfied(effective);
    state.best_verdicts = verdicts;
    state.best_image = std::move(source);
  }
  rebuild_queue(state, task);
  return state;
}

IterationPlan next_plan(const DirectorState& state, const Task& task, const RunConfig& cfg, DecisionPolicy* policy) {
  IterationPlan plan;
  if (state.iteration == 0) {
    // The opening draft always composes the full instruction.
    plan.compose = true;
    plan.goals = task.goals;
  } else {
    if (state.queue.empty()) fail(ErrorCode::InvalidArgument, "no pending goals to schedule");
    Decision scope;
    scope.kind = DecisionKind::Scope;
    scope.features = state_features(state, cfg);
    std::set<Action> tags;
    for (const auto& batch : state.queue) tags.insert(batch_action(goal_of(task, batch.front()).tag));
    scope.legal.assign(tags.begin(), tags.end());
    scope.legal.push_back(Action::BatchAll);
    const Action heuristic = state.gate == GateDecision::OneShot
                                 ? Action::BatchAll
                                 : batch_action(goal_of(task, state.queue.front().front()).tag);
    const Action a = decide(policy, scope, heuristic);
    plan.decisions.push_back(scope);
    if (a == Action::BatchAll) {
      plan.compose = true;
      plan.goals = goals_of(task, state.ledger.pending());
    } else {
      for (const auto& batch : state.queue)
        if (batch_action(goal_of(task, batch.front()).tag) == a) {
          plan.goals = goals_of(task, batch);
          break;
        }
      plan.reprompt = cfg.strategies.reprompting && has_failed_attempt(state.trajectory, plan.goals);
    }
  }
  if (!plan.reprompt) {
    auto d = template_decision(state, cfg);
    plan.template_id = template_id_of(decide(policy, d, Action::Template0));
    plan.decisions.push_back(std::move(d));
  }
  return plan;
}

bool apply_rollback(DirectorState& state, const Image& candidate, std::span<const Verdict> raw_verdicts,
                    std::span<const Verdict> effective, std::span<const std::string> batch_ids) {
  const int coverage = count_satisfied(effective);
  if (coverage >= state.best_coverage) {
    state.best_image = candidate;
    state.best_verdicts.assign(raw_verdicts.begin(), raw_verdicts.end());
    state.best_coverage = coverage;
    state.ledger = ledger_apply(state.ledger, effective);
    state.last_rollback = false;
    return false;
  }
  // The ledger keeps its pre-edit snapshot; the failed batch goes to the back.
  for (const auto& id : batch_ids) {
    std::erase(state.deferred, id);
    state.deferred.push_back(id);
  }
  state.last_rollback = true;
  return true;
}

StepRecord execute_iteration(DirectorState& state, const Task& task, Backends& backends, const RunConfig& cfg,
                             const IterationPlan& plan) {
  if (state.iteration >= cfg.max_iterations) fail(ErrorCode::InvalidArgument, "iteration budget exhausted");
  if (plan.goals.empty()) fail(ErrorCode::InvalidArgument, "empty batch");
  StepRecord step;
  step.iteration = state.iteration + 1;
  step.decisions = plan.decisions;
  auto& traj = state.trajectory;
  try {
    Directive d;
    if (plan.compose) {
      d = backends.planner->compose_directive(plan.goals, state.best_image.has_value(), plan.template_id);
      if (d.addressed_goal_ids.size() != plan.goals.size() || d.text.empty())
        fail(ErrorCode::Backend, "planner returned a malformed composition directive");
    } else if (plan.reprompt) {
      const Directive* prev = last_attempt(traj, plan.goals);
      if (!prev) fail(ErrorCode::InvalidArgument, "reprompt requires a prior failed attempt on the batch");
      d = reprompt(*backends.planner, plan.goals, *prev, traj);
      step.reprompted = true;
    } else {
      d = propose_directive(*backends.planner, state.ledger, plan.goals, traj, plan.template_id);
    }
    step.directive = d;
    const int n = cfg.candidates_for(task.modality);
    if (state.best_image) step.base_image = state.best_image->ref;
    const auto seed_key = mix(fnv1a("candidates"), {cfg.seed, fnv1a(task.id), static_cast<std::uint64_t>(step.iteration)});
    auto candidates = generate_candidates(*backends.editor, d, n, state.best_image, seed_key);
    traj.editor_calls += n;
    for (const auto& c : candidates) step.candidate_seeds.push_back(c.seed);
    const auto chosen = judge_select(*backends.judge, candidates, task.goals);
    for (const auto& c : candidates) step.judge_scores.push_back(*c.judge_score);
    step.chosen_index = static_cast<int>(chosen);
    const Image& image = candidates[chosen].image;
    step.chosen_image = image.ref;
    step.verdicts = verify(*backends.verifier, image, task.goals);
    const auto effective = filter_verdicts(step.verdicts, cfg.confidence_threshold);
    step.coverage = count_satisfied(effective);
    step.rollback = apply_rollback(state, image, step.verdicts, effective, d.addressed_goal_ids);
  } catch (const Error& e) {
    step.error = e.what();
    state.iteration = step.iteration;
    traj.steps.push_back(step);
    throw;
  }
  state.iteration = step.iteration;
  step.best_coverage = state.best_coverage;
  step.pending_after = state.ledger.pending();
  step.completed_after.assign(state.ledger.completed().begin(), state.ledger.completed().end());
  traj.steps.push_back(step);
  return step;
}

StopCheck should_stop(const DirectorState& state, const RunConfig& cfg, Planner& planner, DecisionPolicy* policy) {
  if (state.ledger.pending().empty()) return {true, StopReason::AllSatisfied, std::nullopt};
  if (state.iteration >= cfg.max_iterations) return {true, StopReason::Budget, std::nullopt};
  if (!cfg.strategies.refinement) return {true, StopReason::SinglePass, std::nullopt};
  if (state.iteration % cfg.self_query_cadence != 0) return {};
  Decision d;
  d.kind = DecisionKind::SelfQuery;
  d.features = state_features(state, cfg);
  d.legal = {Action::Continue, Action::Stop};
  Action heuristic = Action::Continue;
  if (!policy && planner.improvement_confidence(state.ledger, state.trajectory) < cfg.self_query_threshold)
    heuristic = Action::Stop;
  const bool stop = decide(policy, d, heuristic) == Action::Stop;
  return {stop, stop ? StopReason::SelfQuery : StopReason::None, d};
}

Trajectory run_task(const Task& task, const RunConfig& cfg, Backends& backends, DecisionPolicy* policy,
                    TrajectoryWriter* sink) {
  cfg.validate();
  DirectorState state;
  state.trajectory.task_id = task.id;
  state.trajectory.modality = task.modality;
  std::size_t written = 0;
  auto flush = [&] {
    if (!sink) return;
    for (; written < state.trajectory.steps.size(); ++written) sink->write_step(state.trajectory.steps[written]);
  };
  auto finish = [&](StopReason reason) {
    auto& t = state.trajectory;
    t.stop_reason = reason;
    t.iterations = state.iteration;
    t.final_image = state.best_image ? state.best_image->ref : "";
    t.final_coverage = state.best_coverage;
    t.final_verdicts = state.best_verdicts;
    flush();
    if (sink) sink->write_terminal(t);
  };
  try {
    state = director_init(task, backends, cfg);
    while (true) {
      const auto plan = next_plan(state, task, cfg, policy);
      execute_iteration(state, task, backends, cfg, plan);
      rebuild_queue(state, task);
      const auto check = should_stop(state, cfg, *backends.planner, policy);
      if (check.self_query) state.trajectory.steps.back().decisions.push_back(*check.self_query);
      flush();
      if (check.stop) {
        finish(check.reason);
        break;
      }
    }
  } catch (const Error&) {
    finish(StopReason::Error);
    throw;
  }
  return state.trajectory;
}

int replay_final_coverage(const Task& task, const Trajectory& traj, const SimConfig& sim, double threshold) {
  const SimWorld world(task, sim);
  Canvas best = world.initial_canvas();
  bool have_image = task.modality == Modality::I2I;
  for (const auto& step : traj.steps) {
    if (step.error) break;
    if (step.chosen_index < 0 || static_cast<std::size_t>(step.chosen_index) >= step.candidate_seeds.size())
      fail(ErrorCode::Validation, "step " + std::to_string(step.iteration) + " has no chosen candidate");
    SimWorld clone = world.at(best);
    const Canvas canvas = clone.apply_edit(step.directive.addressed_goal_ids,
                                           step.candidate_seeds[static_cast<std::size_t>(step.chosen_index)]);
    if (canvas.ref(task.id) != step.chosen_image)
      fail(ErrorCode::Validation, "replay diverged at step " + std::to_string(step.iteration));
    if (!step.rollback) {
      best = canvas;
      have_image = true;
    }
  }
  if (!have_image) return 0;
  SimVerifier verifier(task, sim);
  const Image image{best.ref(task.id), std::make_shared<const Canvas>(best)};
  const auto verdicts = verifier.evaluate(image, task.goals);
  return count_satisfied(filter_verdicts(verdicts, threshold));
}

}  // namespace gdir
