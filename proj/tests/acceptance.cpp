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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Everything runs offline against the simulated world.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <random>
#include <string>

#include "core/director.hpp"
#include "core/grpo.hpp"
#include "core/metrics.hpp"
#include "core/parallel.hpp"
#include "core/sim_backends.hpp"
#include "core/workflows.hpp"
#include "helpers.hpp"

using namespace gdir;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* recipe, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, recipe, a, b, c, d);
  return buf;
}

std::vector<Task> suite(std::size_t count, std::size_t min_goals, std::size_t max_goals, SuiteRecipe::Mix mix,
                        std::uint64_t seed, const std::string& prefix) {
  SuiteRecipe s;
  s.count = count;
  s.min_goals = min_goals;
  s.max_goals = max_goals;
  s.mix = mix;
  s.seed = seed;
  s.id_prefix = prefix;
  return generate_suite(s);
}

// Pooled Finish of one pass over the suite.
double pooled_finish(const std::vector<Task>& tasks, const SimConfig& sim, const RunConfig& base, std::uint64_t seed) {
  std::vector<TaskScore> scores(tasks.size());
  parallel_for(tasks.size(), 4, [&](std::size_t i) {
    RunConfig rc = base;
    rc.seed = task_seed(seed, tasks[i].id);
    auto b = make_sim_backends(tasks[i], sim);
    scores[i] = score_task(run_task(tasks[i], rc, b), rc.confidence_threshold);
  });
  return aggregate(scores).finish;
}

Outcome closed_loop_gain() {
  const auto tasks = suite(200, 15, 23, SuiteRecipe::Mix::T2I, 1, "c1");
  RunConfig full, baseline;
  baseline.strategies = {false, false, false};
  double f_full = 0, f_base = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SimConfig sim;
    sim.p_success = 0.7;
    sim.p_side_effect = 0.1;
    sim.verifier_noise = 0.05;
    sim.seed = seed;
    f_full += pooled_finish(tasks, sim, full, seed) / 5;
    f_base += pooled_finish(tasks, sim, baseline, seed) / 5;
  }
  const double gap = f_full - f_base;
  return {gap >= 0.05, fmt("full Finish %.4f vs single-shot %.4f, gain %.1f points (need >= 5)", f_full, f_base,
                           100 * gap)};
}

Outcome grpo_efficiency() {
  const auto train_set = suite(20, 10, 22, SuiteRecipe::Mix::I2I, 101, "train");
  const auto held_out = suite(20, 10, 22, SuiteRecipe::Mix::I2I, 202, "held");
  SimConfig sim;
  sim.seed = 7;
  const SimBackendFactory factory(sim);
  const RunConfig run;
  TrainConfig cfg;  // G 8, 200 epochs, step 2.0, clip 0.2, beta 0.01
  cfg.seed = 11;
  const auto before = evaluate_policy(PolicyParams::reference(), held_out, factory, run, 4);
  const auto result = train(cfg, train_set, factory, run, std::nullopt, {}, 4);
  const auto after = evaluate_policy(result.params, held_out, factory, run, 4);
  const double cut = 1.0 - after.mean_iterations / before.mean_iterations;
  const bool pass = cut >= 0.15 && after.mean_reward >= before.mean_reward;
  return {pass, fmt("held-out mean iterations %.2f -> %.2f (%.1f%% fewer, need >= 15%%), ", before.mean_iterations,
                    after.mean_iterations, 100 * cut) +
                    fmt("mean reward %.3f -> %.3f", before.mean_reward, after.mean_reward)};
}

PolicyParams random_params(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  PolicyParams p;
  for (Eigen::Index r = 0; r < p.weights.rows(); ++r)
    for (Eigen::Index c = 0; c < p.weights.cols(); ++c) p.weights(r, c) = n(rng);
  return p;
}

// Random group of G sequences, each at most 12 tokens with at least one
// planner token.
RolloutGroup random_group(std::mt19937_64& rng, int G) {
  static constexpr std::array<Action, 10> planner = {Action::BatchGlobal, Action::BatchLayout, Action::BatchLocal,
                                                      Action::BatchText,   Action::BatchAll,    Action::Template0,
                                                      Action::Template1,   Action::Template2,   Action::Continue,
                                                      Action::Stop};
  static constexpr std::array<Action, 5> tools = {Action::JudgePick, Action::VerdictPass, Action::VerdictFail,
                                                   Action::Accept, Action::Rollback};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  RolloutGroup g;
  g.rollouts.resize(static_cast<std::size_t>(G));
  for (auto& r : g.rollouts) {
    const int len = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < len; ++i) {
      ActionToken t;
      t.features[0] = 1.0;
      for (std::size_t k = 1; k < kFeatureCount; ++k) t.features[k] = u(rng);
      const bool tool = i > 0 && rng() % 2;
      if (tool) {
        t.origin = Origin::Tool;
        t.masked = true;
        t.action = tools[rng() % tools.size()];
        t.legal = {t.action};
      } else {
        std::vector<Action> pool(planner.begin(), planner.end());
        std::shuffle(pool.begin(), pool.end(), rng);
        pool.resize(2 + rng() % 4);
        t.legal = pool;
        t.action = pool[rng() % pool.size()];
      }
      r.tokens.push_back(t);
    }
  }
  for (int i = 0; i < G; ++i) g.advantages.push_back(n(rng));
  return g;
}

Outcome gradient_check() {
  std::mt19937_64 rng(3);
  double worst = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const int G = std::array<int, 3>{2, 4, 8}[static_cast<std::size_t>(inst % 3)];
    const std::vector<RolloutGroup> groups = {random_group(rng, G)};
    const auto cur = random_params(rng, 0.3), old = random_params(rng, 0.3), ref = random_params(rng, 0.3);
    const double eps = 0.2, beta = 0.05;
    const auto res = grpo_objective(cur, old, ref, groups, eps, beta);
    Eigen::MatrixXd fd = Eigen::MatrixXd::Zero(cur.weights.rows(), cur.weights.cols());
    const double h = 1e-6;
    for (Eigen::Index r = 0; r < fd.rows(); ++r)
      for (Eigen::Index c = 0; c < fd.cols(); ++c) {
        auto plus = cur, minus = cur;
        plus.weights(r, c) += h;
        minus.weights(r, c) -= h;
        fd(r, c) = (grpo_objective(plus, old, ref, groups, eps, beta).value -
                    grpo_objective(minus, old, ref, groups, eps, beta).value) /
                   (2 * h);
      }
    worst = std::max(worst, (res.gradient - fd).norm() / std::max(fd.norm(), 1e-12));
  }
  return {worst <= 1e-4, fmt("worst relative error %.3g over 100 instances (need <= 1e-4)", worst)};
}

Outcome advantage_oracle() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  double worst = 0.0;
  int flat = 0;
  for (int k = 0; k < 1000; ++k) {
    std::vector<double> r(2 + rng() % 15);
    if (k % 10 == 0) {
      std::fill(r.begin(), r.end(), std::round(u(rng)));
      ++flat;
    } else {
      for (auto& x : r) x = u(rng);
    }
    double mean = 0.0;
    for (double x : r) mean += x;
    mean /= static_cast<double>(r.size());
    double var = 0.0;
    for (double x : r) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / static_cast<double>(r.size()));
    const auto a = compute_advantages(r);
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double expected = sd == 0.0 ? 0.0 : (r[i] - mean) / (sd + 1e-8);
      worst = std::max(worst, std::abs(a[i] - expected));
    }
  }
  return {worst <= 1e-12, fmt("max deviation %.3g over 1000 groups, %.0f zero-variance (need <= 1e-12)", worst, flat)};
}

Outcome mask_nullity() {
  const auto tasks = suite(3, 15, 23, SuiteRecipe::Mix::Mixed, 9, "mask");
  SimConfig sim;
  sim.seed = 2;
  const SimBackendFactory factory(sim);
  std::mt19937_64 rng(5);
  auto cur = PolicyParams::reference();
  cur.weights += random_params(rng, 0.2).weights;
  const auto ref = PolicyParams::reference();
  std::vector<RolloutGroup> groups;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    std::vector<std::uint64_t> seeds(8);
    std::iota(seeds.begin(), seeds.end(), 100 * t);
    groups.push_back(rollout_group(cur, tasks[t], 8, factory, RunConfig{}, seeds));
  }
  const auto base = grpo_objective(cur, cur, ref, groups, 0.2, 0.01);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    auto p = cur;
    for (auto a : {Action::JudgePick, Action::VerdictPass, Action::VerdictFail, Action::Accept, Action::Rollback})
      p.weights.row(static_cast<Eigen::Index>(a)) += random_params(rng, 5.0).weights.row(0);
    const auto res = grpo_objective(p, cur, ref, groups, 0.2, 0.01);
    worst = std::max(worst, std::abs(res.value - base.value));
  }
  return {worst == 0.0, fmt("largest objective change %.3g across 50 tool-logit perturbations (need exactly 0)", worst)};
}

Outcome metric_oracle() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> conf(0.6, 1.0);
  int mismatches = 0;
  for (int set = 0; set < 50; ++set) {
    std::vector<TaskScore> scores;
    long sat_all = 0, total_all = 0, success = 0;
    const int tasks = 1 + static_cast<int>(rng() % 8);
    for (int k = 0; k < tasks; ++k) {
      Trajectory t;
      t.task_id = "t" + std::to_string(k);
      const int n = 1 + static_cast<int>(rng() % 23);
      int sat = 0;
      std::array<int, 6> per_sat{}, per_total{};
      for (int i = 0; i < n; ++i) {
        const auto type = kGoalTypes[rng() % 6];
        t.goals.push_back({"g" + std::to_string(i), type, GoalTag::Local});
        const bool s = rng() % 3 != 0;
        const double c = std::round(conf(rng) * 100) / 100;  // lands on 0.80 / 0.81 often
        t.final_verdicts.push_back({"g" + std::to_string(i), s, c, ""});
        const bool pass = s && c >= 0.81;
        sat += pass;
        per_sat[static_cast<std::size_t>(type)] += pass;
        ++per_total[static_cast<std::size_t>(type)];
      }
      const auto sc = score_task(t);
      const Label expected = sat == 0 ? Label::Failure : (10 * sat >= 8 * n ? Label::Success : Label::Partial);
      if (sc.effective_satisfied != sat || sc.label != expected) ++mismatches;
      for (std::size_t ty = 0; ty < 6; ++ty)
        if (sc.per_type[ty].satisfied != per_sat[ty] || sc.per_type[ty].total != per_total[ty]) ++mismatches;
      sat_all += sat;
      total_all += n;
      success += expected == Label::Success;
      scores.push_back(sc);
    }
    const auto r = aggregate(scores);
    if (r.finish != static_cast<double>(sat_all) / static_cast<double>(total_all)) ++mismatches;
    if (r.success_rate != static_cast<double>(success) / tasks) ++mismatches;
  }
  const std::vector<Verdict> edge = {{"a", true, 0.80, ""}, {"b", true, 0.81, ""}};
  const auto f = filter_verdicts(edge);
  const bool boundary = !f[0].satisfied && f[1].satisfied;
  return {mismatches == 0 && boundary,
          fmt("%.0f mismatches over 50 verdict sets; 0.80 filtered and 0.81 kept: ", mismatches) +
              (boundary ? "yes" : "no")};
}

Outcome rollback_invariant() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const RunConfig cfg;
  int violations = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto mix = k % 2 ? Modality::I2I : Modality::T2I;
    const auto task = testing::numbered_task("fz" + std::to_string(k), 3 + rng() % 21, mix,
                                             {GoalTag::Global, GoalTag::Layout, GoalTag::Local, GoalTag::TextOverlay});
    SimConfig sim;
    sim.p_success = u(rng);
    sim.p_side_effect = u(rng);
    sim.verifier_noise = 0.3 * u(rng);
    sim.i2i_presatisfied = mix == Modality::I2I ? u(rng) : 0.0;
    sim.seed = rng();
    auto b = make_sim_backends(task, sim);
    const auto traj = run_task(task, cfg, b);
    int best = -1;
    for (const auto& s : traj.steps) {
      if (s.best_coverage < best) ++violations;
      best = s.best_coverage;
    }
  }
  // Forced regressions need something to regress: image-to-image sources
  // with some goals already satisfied and some still pending.
  int forced = 0, without_rollback = 0;
  for (int k = 0; k < 200; ++k) {
    const auto task = testing::numbered_task("rb" + std::to_string(k), 6 + rng() % 18, Modality::I2I,
                                             {GoalTag::Global, GoalTag::Local, GoalTag::TextOverlay});
    SimConfig sim;
    sim.p_success = 0.0;
    sim.p_side_effect = 1.0;
    sim.verifier_noise = 0.05 * u(rng);
    sim.i2i_presatisfied = 0.2 + 0.6 * u(rng);
    sim.seed = rng();
    auto b = make_sim_backends(task, sim);
    const auto traj = run_task(task, cfg, b);
    ++forced;
    if (std::none_of(traj.steps.begin(), traj.steps.end(), [](const StepRecord& s) { return s.rollback; }))
      ++without_rollback;
  }
  return {violations == 0 && without_rollback == 0,
          fmt("%.0f coverage decreases in 1000 fuzzed runs; %.0f of %.0f forced-regression runs without a rollback",
              violations, without_rollback, forced)};
}

int run_cli(const std::string& args) {
  const std::string cmd = "\"" GDIR_CLI_PATH "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
  testing::TempDir dir;
  const auto q = [](const std::filesystem::path& p) { return "\"" + p.string() + "\""; };
  const auto suite_dir = dir.path() / "suite";
  if (run_cli("gen --out " + q(suite_dir) + " --count 12 --mix mixed --seed 8") != 0)
    return {false, "suite generation failed"};
  for (const char* out : {"a", "b"})
    if (run_cli("run --suite " + q(suite_dir) + " --out " + q(dir.path() / out) + " --jobs 4 --seed 42") != 0)
      return {false, std::string("run ") + out + " failed"};
  int files = 0, differing = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.path() / "a" / "trajectories")) {
    ++files;
    const auto other = dir.path() / "b" / "trajectories" / e.path().filename();
    if (!std::filesystem::exists(other) || read_file(e.path()) != read_file(other)) ++differing;
  }
  return {files == 12 && differing == 0,
          fmt("%.0f trajectory files compared across two CLI runs, %.0f differ", files, differing)};
}

Outcome gate_boundary() {
  const RunConfig cfg;
  const bool at_cap = gate_one_shot(0.9, 15, false, cfg) == GateDecision::OneShot;
  const bool over_cap = gate_one_shot(0.9, 16, false, cfg) == GateDecision::Staged;
  int grid_errors = 0, points = 0;
  for (int f = 0; f <= 100; ++f)
    for (std::size_t n = 0; n <= 40; ++n)
      for (bool c : {false, true}) {
        const double feas = f / 100.0;
        const bool expected = feas >= cfg.one_shot_feasibility_gate && n <= 15 && !c;
        grid_errors += (gate_one_shot(feas, n, c, cfg) == GateDecision::OneShot) != expected;
        ++points;
      }
  return {at_cap && over_cap && grid_errors == 0,
          std::string("(0.9, 15) ") + (at_cap ? "OneShot" : "Staged") + ", (0.9, 16) " +
              (over_cap ? "Staged" : "OneShot") + fmt(", %.0f grid errors over %.0f points", grid_errors, points)};
}

Outcome budget_cap() {
  const auto tasks = suite(60, 10, 23, SuiteRecipe::Mix::Mixed, 10, "budget");
  SimConfig sim;
  sim.p_success = 0.0;
  sim.i2i_presatisfied = 0.3;
  const RunConfig cfg;
  int bad_iters = 0, bad_calls = 0;
  for (const auto& t : tasks) {
    auto b = make_sim_backends(t, sim);
    RunConfig rc = cfg;
    rc.seed = task_seed(1, t.id);
    const auto traj = run_task(t, rc, b);
    bad_iters += traj.iterations != 6 || traj.steps.size() != 6;
    bad_calls += traj.editor_calls > 6 * cfg.candidates_for(t.modality);
  }
  return {bad_iters == 0 && bad_calls == 0,
          fmt("%.0f tasks: %.0f without exactly 6 iterations, %.0f over the editor budget", 60, bad_iters, bad_calls)};
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, closed_loop_gain}, {2, grpo_efficiency}, {3, gradient_check},      {4, advantage_oracle},
      {5, mask_nullity},     {6, metric_oracle},   {7, rollback_invariant}, {8, determinism},
      {9, gate_boundary},    {10, budget_cap}};
  int failed = 0;
  for (const auto& [id, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
