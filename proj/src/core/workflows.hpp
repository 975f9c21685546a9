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

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/grpo.hpp"
#include "core/metrics.hpp"

namespace gdir {

// Builds each role from the selection in the config.
class ConfiguredBackendFactory final : public BackendFactory {
 public:
  explicit ConfiguredBackendFactory(const AppConfig& cfg) : cfg_(cfg) {}
  Backends make(const Task& task, const std::filesystem::path& task_dir) const override;
  bool simulated() const override { return cfg_.backends.all_sim(); }

 private:
  AppConfig cfg_;
};

struct TaskOutcome {
  std::string task_id;
  std::uint64_t seed = 0;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  bool ok = true;
  std::string stop_reason;
  std::string error;
};

struct RunSummary {
  std::vector<TaskOutcome> tasks;
  int failed = 0;
  std::filesystem::path manifest;
};

std::uint64_t task_seed(std::uint64_t run_seed, const std::string& task_id);

// Runs every task of the suite with at most `jobs` tasks in flight. Writes
// trajectories/<task>.jsonl and run_manifest.json under out_dir. Task errors
// are recorded and counted; they do not stop other tasks.
RunSummary run_suite(const AppConfig& cfg, const std::filesystem::path& suite_dir,
                     const std::filesystem::path& out_dir, std::size_t jobs,
                     const std::optional<std::filesystem::path>& policy_path = std::nullopt);

// Scores all trajectories found under out_dir (or out_dir/trajectories) and
// writes report.json next to them.
BenchReport eval_dir(const std::filesystem::path& out_dir, double threshold);

struct TrainSummary {
  PolicyEval before;
  PolicyEval after;
  int epochs_run = 0;
  std::filesystem::path params_path;
  std::filesystem::path history_path;
};

TrainSummary train_suite(const AppConfig& cfg, const std::filesystem::path& suite_dir,
                         const std::filesystem::path& out_dir, std::size_t jobs,
                         const std::optional<std::filesystem::path>& resume = std::nullopt,
                         const std::function<void(const EpochStats&)>& on_epoch = {});

std::string render_report_file(const std::filesystem::path& report_json);

}  // namespace gdir
