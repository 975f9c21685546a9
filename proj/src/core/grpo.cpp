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

#include "core/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <sstream>

#include "core/error.hpp"
#include "core/metrics.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace gdir {
namespace {

ActionToken planner_token(const Decision& d) {
  if (origin_of(d.action) != Origin::Planner ||
      std::find(d.legal.begin(), d.legal.end(), d.action) == d.legal.end())
    fail(ErrorCode::InvalidArgument, "unencodable decision '" + std::string(to_string(d.action)) + "'");
  for (auto a : d.legal)
    if (origin_of(a) != Origin::Planner) fail(ErrorCode::InvalidArgument, "planner decision offers a tool action");
  return {d.action, Origin::Planner, false, d.features, d.legal};
}

ActionToken tool_token(Action a, const Features& f, std::vector<Action> legal) {
  return {a, Origin::Tool, true, f, std::move(legal)};
}

struct TokenTerms {
  double surrogate = 0.0;
  double kl = 0.0;
};

// Adds the derivative of (surrogate - beta * kl) for one token, scaled by
// `weight`, into `grad`.
TokenTerms token_terms(const PolicyParams& params, const PolicyParams& old_params, const PolicyParams& ref_params,
                       const ActionToken& tok, double advantage, double clip_eps, double beta, double weight,
                       Eigen::MatrixXd& grad) {
  const auto p = legal_probs(params, tok.features, tok.legal);
  const auto p_old = legal_probs(old_params, tok.features, tok.legal);
  const auto q = legal_probs(ref_params, tok.features, tok.legal);
  const auto y = static_cast<Eigen::Index>(std::find(tok.legal.begin(), tok.legal.end(), tok.action) -
                                           tok.legal.begin());
  const double rho = p(y) / p_old(y);
  const double unclipped = rho * advantage;
  const double clipped = std::clamp(rho, 1.0 - clip_eps, 1.0 + clip_eps) * advantage;
  TokenTerms t;
  t.surrogate = std::min(unclipped, clipped);
  const Eigen::ArrayXd log_ratio = p.array().log() - q.array().log();
  t.kl = (p.array() * log_ratio).sum();

  const double dsur_drho = unclipped <= clipped ? advantage : 0.0;
  const Eigen::VectorXd phi = feature_vector(tok.features) / params.temperature;
  for (Eigen::Index b = 0; b < p.size(); ++b) {
    const double dsur = dsur_drho * rho * ((b == y ? 1.0 : 0.0) - p(b));
    const double dkl = p(b) * (log_ratio(b) - t.kl);
    const auto r = static_cast<Eigen::Index>(tok.legal[static_cast<std::size_t>(b)]);
    grad.row(r) += weight * (dsur - beta * dkl) * phi.transpose();
  }
  return t;
}

}  // namespace

std::vector<ActionToken> encode_trajectory(const Trajectory& traj) {
  if (traj.steps.empty()) fail(ErrorCode::InvalidArgument, "cannot encode an empty trajectory");
  std::vector<ActionToken> out;
  for (const auto& step : traj.steps) {
    const Features f = step.decisions.empty() ? Features{} : step.decisions.front().features;
    for (const auto& d : step.decisions)
      if (d.kind != DecisionKind::SelfQuery) out.push_back(planner_token(d));
    if (step.error) continue;
    out.push_back(tool_token(Action::JudgePick, f, {Action::JudgePick}));
    for (const auto& v : step.verdicts)
      out.push_back(tool_token(v.satisfied ? Action::VerdictPass : Action::VerdictFail, f,
                               {Action::VerdictPass, Action::VerdictFail}));
    out.push_back(tool_token(step.rollback ? Action::Rollback : Action::Accept, f, {Action::Accept, Action::Rollback}));
    for (const auto& d : step.decisions)
      if (d.kind == DecisionKind::SelfQuery) out.push_back(planner_token(d));
  }
  return out;
}

double reward_score(const Trajectory& traj, double threshold) {
  if (traj.goals.empty()) return 0.0;
  const auto effective = filter_verdicts(traj.final_verdicts, threshold);
  return 5.0 * count_satisfied(effective) / static_cast<double>(traj.goals.size());
}

std::vector<double> compute_advantages(std::span<const double> rewards, bool std_normalize) {
  if (rewards.size() < 2) fail(ErrorCode::InvalidArgument, "a group needs at least two rewards");
  const double n = static_cast<double>(rewards.size());
  const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double sd = std::sqrt(var / n);
  std::vector<double> adv(rewards.size(), 0.0);
  if (sd == 0.0) return adv;
  for (std::size_t i = 0; i < rewards.size(); ++i)
    adv[i] = std_normalize ? (rewards[i] - mean) / (sd + 1e-8) : rewards[i] - mean;
  return adv;
}

ObjectiveResult grpo_objective(const PolicyParams& params, const PolicyParams& old_params,
                               const PolicyParams& ref_params, std::span<const RolloutGroup> groups,
                               double clip_eps, double beta) {
  if (!(clip_eps > 0.0)) fail(ErrorCode::InvalidArgument, "clip_eps must be positive");
  if (!(beta >= 0.0)) fail(ErrorCode::InvalidArgument, "beta must not be negative");
  if (groups.empty()) fail(ErrorCode::InvalidArgument, "no rollout groups");
  ObjectiveResult res;
  res.gradient = Eigen::MatrixXd::Zero(params.weights.rows(), params.weights.cols());
  double kl_sum = 0.0;
  std::size_t kl_tokens = 0;
  const double group_weight = 1.0 / static_cast<double>(groups.size());
  for (const auto& g : groups) {
    if (g.rollouts.size() != g.advantages.size()) fail(ErrorCode::InvalidArgument, "advantage count mismatch");
    const double traj_weight = group_weight / static_cast<double>(g.rollouts.size());
    for (std::size_t i = 0; i < g.rollouts.size(); ++i) {
      const auto& tokens = g.rollouts[i].tokens;
      const auto m = std::count_if(tokens.begin(), tokens.end(), [](const ActionToken& t) { return !t.masked; });
      if (m == 0) fail(ErrorCode::InvalidArgument, "trajectory has no unmasked tokens");
      const double w = traj_weight / static_cast<double>(m);
      for (const auto& tok : tokens) {
        if (tok.masked) continue;
        const auto t = token_terms(params, old_params, ref_params, tok, g.advantages[i], clip_eps, beta, w,
                                   res.gradient);
        res.surrogate += w * t.surrogate;
        res.value += w * (t.surrogate - beta * t.kl);
        kl_sum += t.kl;
        ++kl_tokens;
      }
    }
  }
  res.kl = kl_tokens ? kl_sum / static_cast<double>(kl_tokens) : 0.0;
  return res;
}

RolloutGroup rollout_group(const PolicyParams& params, const Task& task, int G, const BackendFactory& factory,
                           const RunConfig& cfg, std::span<const std::uint64_t> seeds, const RolloutOptions& opts) {
  if (G < 2) fail(ErrorCode::InvalidArgument, "group size must be at least 2");
  if (seeds.size() != static_cast<std::size_t>(G)) fail(ErrorCode::InvalidArgument, "need one seed per rollout");
  if (!factory.simulated()) fail(ErrorCode::Config, "training requires sim backends");
  RolloutGroup group;
  group.task_id = task.id;
  group.rollouts.resize(static_cast<std::size_t>(G));
  parallel_for(group.rollouts.size(), opts.jobs, [&](std::size_t i) {
    RunConfig rc = cfg;
    rc.seed = seeds[i];
    auto backends = factory.make(task, {});
    GreedyPolicy greedy(params);
    SampledPolicy sampled(params, mix(fnv1a("policy"), seeds[i]));
    DecisionPolicy* policy = opts.greedy ? static_cast<DecisionPolicy*>(&greedy) : &sampled;
    auto& r = group.rollouts[i];
    r.trajectory = run_task(task, rc, backends, policy);
    r.tokens = encode_trajectory(r.trajectory);
    r.reward = reward_score(r.trajectory, opts.threshold);
  });
  std::vector<double> rewards;
  for (const auto& r : group.rollouts) rewards.push_back(r.reward);
  group.advantages = compute_advantages(rewards, opts.std_normalize);
  return group;
}

void TrainConfig::validate() const {
  if (group_size < 2) fail(ErrorCode::Config, "train.group_size must be at least 2");
  if (epochs < 0) fail(ErrorCode::Config, "train.epochs must not be negative");
  if (!(step_size >= 0.0)) fail(ErrorCode::Config, "train.step_size must not be negative");
  if (!(clip_eps > 0.0)) fail(ErrorCode::Config, "train.clip_eps must be positive");
  if (!(beta >= 0.0)) fail(ErrorCode::Config, "train.beta must not be negative");
  if (!(temperature > 0.0)) fail(ErrorCode::Config, "train.temperature must be positive");
}

PolicyEval evaluate_policy(const PolicyParams& params, std::span<const Task> tasks, const BackendFactory& factory,
                           const RunConfig& cfg, std::size_t jobs) {
  if (tasks.empty()) fail(ErrorCode::InvalidArgument, "no tasks to evaluate");
  std::vector<Trajectory> trajs(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t i) {
    auto backends = factory.make(tasks[i], {});
    GreedyPolicy policy(params);
    trajs[i] = run_task(tasks[i], cfg, backends, &policy);
  });
  PolicyEval e;
  for (const auto& t : trajs) {
    e.mean_reward += reward_score(t, cfg.confidence_threshold);
    e.mean_iterations += t.iterations;
    e.mean_editor_calls += t.editor_calls;
  }
  const double n = static_cast<double>(trajs.size());
  e.mean_reward /= n;
  e.mean_iterations /= n;
  e.mean_editor_calls /= n;
  return e;
}

TrainResult train(const TrainConfig& cfg, std::span<const Task> suite, const BackendFactory& factory,
                  const RunConfig& run_cfg, std::optional<PolicyParams> start, std::vector<EpochStats> prior_history,
                  std::size_t jobs, const std::function<void(const EpochStats&)>& on_epoch) {
  cfg.validate();
  if (suite.empty()) fail(ErrorCode::InvalidArgument, "training suite is empty");
  if (!factory.simulated()) fail(ErrorCode::Config, "training requires sim backends");
  PolicyParams ref = PolicyParams::reference();
  ref.temperature = cfg.temperature;
  TrainResult result{start.value_or(ref), std::move(prior_history)};
  result.params.temperature = cfg.temperature;

  double peak = 0.0;
  for (const auto& h : result.history) peak = std::max(peak, h.mean_reward);
  int below = 0;
  const int first = static_cast<int>(result.history.size());
  for (int epoch = first; epoch < first + cfg.epochs; ++epoch) {
    const PolicyParams old = result.params;
    std::vector<RolloutGroup> groups;
    std::vector<std::string> discarded;
    for (std::size_t t = 0; t < suite.size(); ++t) {
      std::vector<std::uint64_t> seeds;
      for (int i = 0; i < cfg.group_size; ++i)
        seeds.push_back(mix(fnv1a("rollout"), {cfg.seed, static_cast<std::uint64_t>(epoch), t,
                                              static_cast<std::uint64_t>(i)}));
      try {
        groups.push_back(rollout_group(old, suite[t], cfg.group_size, factory, run_cfg, seeds,
                                       {false, cfg.std_normalize, jobs, run_cfg.confidence_threshold}));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Backend) throw;
        std::cerr << "epoch " << epoch << ": discarded group for " << suite[t].id << ": " << e.what() << '\n';
      }
    }
    if (groups.empty()) fail(ErrorCode::Backend, "every rollout group failed");

    EpochStats stats;
    stats.epoch = epoch;
    std::size_t n = 0;
    for (const auto& g : groups)
      for (const auto& r : g.rollouts) {
        stats.mean_reward += r.reward;
        stats.mean_iterations += r.trajectory.iterations;
        ++n;
      }
    stats.mean_reward /= static_cast<double>(n);
    stats.mean_iterations /= static_cast<double>(n);
    const auto obj = grpo_objective(result.params, old, ref, groups, cfg.clip_eps, cfg.beta);
    stats.kl = obj.kl;
    result.params.weights += cfg.step_size * obj.gradient;
    if (!result.params.finite()) fail(ErrorCode::Diverged, "policy parameters became non-finite");
    result.history.push_back(stats);
    if (on_epoch) on_epoch(stats);

    peak = std::max(peak, stats.mean_reward);
    below = stats.mean_reward < 0.5 * peak ? below + 1 : 0;
    if (below >= 10)
      fail(ErrorCode::Diverged, "mean reward stayed below half of its peak for 10 epochs (epoch " +
                                    std::to_string(epoch) + ")");
  }
  return result;
}

std::string history_to_csv(std::span<const EpochStats> history) {
  std::ostringstream out;
  out << "epoch,mean_reward,mean_iterations,kl\n";
  char buf[128];
  for (const auto& h : history) {
    std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,%.10g\n", h.epoch, h.mean_reward, h.mean_iterations, h.kl);
    out << buf;
  }
  return out.str();
}

std::vector<EpochStats> history_from_csv(std::string_view text) {
  std::vector<EpochStats> out;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line.rfind("epoch", 0) == 0) continue;
    }
    EpochStats h;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf", &h.epoch, &h.mean_reward, &h.mean_iterations, &h.kl) != 4)
      fail(ErrorCode::Parse, "malformed history row: " + line);
    out.push_back(h);
  }
  return out;
}

}  // namespace gdir
