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

#include "core/workflows.hpp"

#include <algorithm>
#include <chrono>
#include <mutex>

#include <json.hpp>

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"
#include "core/sim_backends.hpp"

namespace gdir {
namespace {

std::int64_t now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

void require_dir(const std::filesystem::path& p, const char* what) {
  if (!std::filesystem::is_directory(p)) fail(ErrorCode::Config, std::string(what) + " not found: " + p.string());
}

std::vector<Task> load_tasks(const std::filesystem::path& suite_dir) {
  require_dir(suite_dir, "task directory");
  auto suite = load_suite(suite_dir);
  if (suite.tasks.empty()) fail(ErrorCode::Config, "suite " + suite_dir.string() + " has no tasks");
  return std::move(suite.tasks);
}

}  // namespace

Backends ConfiguredBackendFactory::make(const Task& task, const std::filesystem::path& task_dir) const {
  const auto& sel = cfg_.backends;
  Backends b = make_sim_backends(task, cfg_.sim, cfg_.run.max_in_flight);
  if (sel.planner == BackendKind::Http) b.planner = std::make_unique<HttpPlanner>(cfg_.http);
  if (sel.editor == BackendKind::Http) b.editor = std::make_unique<HttpEditor>(cfg_.http, task, task_dir);
  if (sel.verifier == BackendKind::Http) b.verifier = std::make_unique<HttpVerifier>(cfg_.http);
  if (sel.judge == BackendKind::Http) b.judge = std::make_unique<HttpJudge>(cfg_.http);
  return b;
}

std::uint64_t task_seed(std::uint64_t run_seed, const std::string& task_id) {
  return mix(fnv1a("task-seed"), {run_seed, fnv1a(task_id)});
}

RunSummary run_suite(const AppConfig& cfg, const std::filesystem::path& suite_dir, const std::filesystem::path& out_dir,
                     std::size_t jobs, const std::optional<std::filesystem::path>& policy_path) {
  const auto tasks = load_tasks(suite_dir);
  std::optional<PolicyParams> params;
  if (policy_path) params = load_params(*policy_path);
  const ConfiguredBackendFactory factory(cfg);
  const auto traj_dir = out_dir / "trajectories";
  std::filesystem::create_directories(traj_dir);

  RunSummary summary;
  summary.tasks.resize(tasks.size());
  const auto started = now_ms();
  parallel_for(tasks.size(), std::max<std::size_t>(jobs, 1), [&](std::size_t i) {
    const Task& task = tasks[i];
    auto& outcome = summary.tasks[i];
    outcome.task_id = task.id;
    outcome.seed = task_seed(cfg.run.seed, task.id);
    outcome.start_ms = now_ms();
    RunConfig rc = cfg.run;
    rc.seed = outcome.seed;
    try {
      auto backends = factory.make(task, suite_dir);
      TrajectoryWriter writer(traj_dir / (task.id + ".jsonl"));
      std::optional<GreedyPolicy> policy;
      if (params) policy.emplace(*params);
      const auto traj = run_task(task, rc, backends, policy ? &*policy : nullptr, &writer);
      outcome.stop_reason = std::string(to_string(traj.stop_reason));
    } catch (const Error& e) {
      outcome.ok = false;
      outcome.stop_reason = std::string(to_string(StopReason::Error));
      outcome.error = e.what();
    }
    outcome.end_ms = now_ms();
  });

  nlohmann::ordered_json m;
  m["config_hash"] = cfg.hash();
  m["suite"] = suite_dir.string();
  m["jobs"] = jobs;
  m["run_seed"] = cfg.run.seed;
  m["sim_seed"] = cfg.sim.seed;
  m["policy"] = policy_path ? nlohmann::ordered_json(policy_path->string()) : nlohmann::ordered_json(nullptr);
  m["started_ms"] = started;
  m["finished_ms"] = now_ms();
  m["tasks"] = nlohmann::ordered_json::array();
  for (const auto& o : summary.tasks) {
    nlohmann::ordered_json t = {{"id", o.task_id},         {"seed", o.seed},
                                {"start_ms", o.start_ms},  {"end_ms", o.end_ms},
                                {"status", o.ok ? "ok" : "error"}, {"stop_reason", o.stop_reason}};
    if (!o.ok) t["error"] = o.error;
    m["tasks"].push_back(t);
    if (!o.ok) ++summary.failed;
  }
  summary.manifest = out_dir / "run_manifest.json";
  write_file(summary.manifest, m.dump(2) + "\n");
  return summary;
}

BenchReport eval_dir(const std::filesystem::path& out_dir, double threshold) {
  if (!std::filesystem::is_directory(out_dir)) fail(ErrorCode::NotFound, "output directory not found: " + out_dir.string());
  auto dir = out_dir / "trajectories";
  if (!std::filesystem::is_directory(dir)) dir = out_dir;
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  if (files.empty()) fail(ErrorCode::NotFound, "no trajectories found in " + dir.string());
  std::sort(files.begin(), files.end());
  std::vector<TaskScore> scores;
  for (const auto& f : files) scores.push_back(score_task(read_trajectory(f), threshold));
  const auto report = aggregate(scores);
  write_file(out_dir / "report.json", report_to_json(report));
  return report;
}

TrainSummary train_suite(const AppConfig& cfg, const std::filesystem::path& suite_dir,
                         const std::filesystem::path& out_dir, std::size_t jobs,
                         const std::optional<std::filesystem::path>& resume,
                         const std::function<void(const EpochStats&)>& on_epoch) {
  if (!cfg.backends.all_sim()) fail(ErrorCode::Config, "training requires sim backends");
  const auto tasks = load_tasks(suite_dir);
  const ConfiguredBackendFactory factory(cfg);
  std::optional<PolicyParams> start;
  std::vector<EpochStats> history;
  if (resume) {
    start = load_params(*resume);
    const auto hist = resume->parent_path() / "history.csv";
    if (std::filesystem::exists(hist)) history = history_from_csv(read_file(hist));
  }
  PolicyParams initial = start.value_or(PolicyParams::reference());
  initial.temperature = cfg.train.temperature;

  TrainSummary s;
  s.before = evaluate_policy(initial, tasks, factory, cfg.run, jobs);
  std::filesystem::create_directories(out_dir);
  s.params_path = out_dir / "policy.json";
  s.history_path = out_dir / "history.csv";
  auto on = [&](const EpochStats& e) {
    history.push_back(e);
    write_file(s.history_path, history_to_csv(history));
    if (on_epoch) on_epoch(e);
  };
  const auto prior = history;
  const auto result = train(cfg.train, tasks, factory, cfg.run, start, prior, jobs, on);
  save_params(s.params_path, result.params, static_cast<int>(result.history.size()));
  write_file(s.history_path, history_to_csv(result.history));
  s.epochs_run = static_cast<int>(result.history.size() - prior.size());
  s.after = evaluate_policy(result.params, tasks, factory, cfg.run, jobs);
  return s;
}

std::string render_report_file(const std::filesystem::path& report_json) {
  if (!std::filesystem::is_regular_file(report_json))
    fail(ErrorCode::NotFound, "report not found: " + report_json.string());
  return render_table(report_from_json(read_file(report_json)));
}

}  // namespace gdir
