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

// gdir: command-line front end over the goaldirector C API.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gdir/gdir.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitTaskFailure = 1;
constexpr int kExitConfig = 2;

struct ConfigDeleter {
  void operator()(gdir_config* c) const { gdir_config_free(c); }
};
using ConfigPtr = std::unique_ptr<gdir_config, ConfigDeleter>;

struct OwnedString {
  char* s = nullptr;
  ~OwnedString() { gdir_string_free(s); }
  std::string str() const { return s ? s : ""; }
};

int report_failure(gdir_status st) {
  std::cerr << "gdir: " << gdir_status_name(st) << ": " << gdir_last_error() << '\n';
  return (st == GDIR_ERR_CONFIG || st == GDIR_ERR_INVALID_ARGUMENT) ? kExitConfig : kExitTaskFailure;
}

struct Common {
  std::string config;
  std::string suite;
  std::string out;
  unsigned jobs = 1;
  std::optional<std::uint64_t> seed;
};

// Loads the config, applies --seed, and fills unset paths from it.
gdir_status open_config(Common& c, ConfigPtr& cfg) {
  gdir_config* raw = nullptr;
  if (auto st = gdir_config_load(c.config.empty() ? nullptr : c.config.c_str(), &raw); st != GDIR_OK) return st;
  cfg.reset(raw);
  if (c.seed) {
    const auto s = std::to_string(*c.seed);
    for (const char* key : {"run.seed", "sim.seed", "train.seed"})
      if (auto st = gdir_config_set(cfg.get(), key, s.c_str()); st != GDIR_OK) return st;
  }
  auto fill = [&](std::string& target, const char* which) {
    if (!target.empty()) return GDIR_OK;
    OwnedString p;
    const auto st = gdir_config_get_path(cfg.get(), which, &p.s);
    if (st == GDIR_OK) target = p.str();
    return st;
  };
  if (auto st = fill(c.suite, "tasks"); st != GDIR_OK) return st;
  return fill(c.out, "output");
}

void print_epoch(int epoch, double reward, double iters, double kl, void*) {
  if (epoch % 10 == 0) std::printf("epoch %4d  reward %.4f  iterations %.3f  kl %.5f\n", epoch, reward, iters, kl);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Goal-directed closed-loop image generation controller"};
  app.require_subcommand(1);
  app.set_version_flag("--version", gdir_version());

  Common c;
  std::string policy, resume, report_path;
  auto add_common = [&](CLI::App* sub, bool suite, bool jobs) {
    sub->add_option("--config", c.config, "Config file (key = value)");
    if (suite) sub->add_option("--suite", c.suite, "Task suite directory");
    sub->add_option("--out", c.out, "Output directory");
    if (jobs) sub->add_option("--jobs", c.jobs, "Tasks in flight")->check(CLI::PositiveNumber);
    sub->add_option("--seed", c.seed, "Seed for the run and the simulated world");
  };

  auto* run = app.add_subcommand("run", "Run a suite through the director");
  add_common(run, true, true);
  run->add_option("--policy", policy, "Trained policy file to drive planner decisions");

  auto* eval = app.add_subcommand("eval", "Score trajectories and write report.json");
  eval->add_option("--config", c.config, "Config file (for the confidence threshold)");
  eval->add_option("--out", c.out, "Run output directory");

  auto* train = app.add_subcommand("train", "Post-train the planner policy with GRPO");
  add_common(train, true, true);
  train->add_option("--resume", resume, "Continue from a saved policy file");

  auto* report = app.add_subcommand("report", "Render an existing report.json");
  report->add_option("report", report_path, "report.json or a directory holding it")->required();

  unsigned count = 20, min_goals = 15, max_goals = 23;
  std::string mix = "t2i";
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen", "Generate a simulated task suite");
  gen->add_option("--out", c.out, "Suite directory")->required();
  gen->add_option("--count", count, "Number of tasks");
  gen->add_option("--min-goals", min_goals, "Fewest goals per task");
  gen->add_option("--max-goals", max_goals, "Most goals per task");
  gen->add_option("--mix", mix, "t2i, i2i or mixed")->check(CLI::IsMember({"t2i", "i2i", "mixed"}));
  gen->add_option("--seed", gen_seed, "Generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  if (*report) {
    std::filesystem::path p = report_path;
    if (std::filesystem::is_directory(p)) p /= "report.json";
    OwnedString table;
    if (auto st = gdir_report_render(p.c_str(), &table.s); st != GDIR_OK) return report_failure(st);
    std::cout << table.str();
    return kExitOk;
  }

  if (*gen) {
    if (auto st = gdir_generate_suite(c.out.c_str(), count, min_goals, max_goals, mix.c_str(), gen_seed); st != GDIR_OK)
      return report_failure(st);
    std::cout << "wrote " << count << " tasks to " << c.out << '\n';
    return kExitOk;
  }

  ConfigPtr cfg;
  if (auto st = open_config(c, cfg); st != GDIR_OK) return report_failure(st);

  if (*run) {
    gdir_run_result res{};
    const auto st = gdir_run_suite(cfg.get(), c.suite.c_str(), c.out.c_str(), c.jobs,
                                   policy.empty() ? nullptr : policy.c_str(), &res);
    if (st != GDIR_OK) return report_failure(st);
    std::cout << "ran " << res.tasks << " tasks, " << res.failed << " failed; manifest "
              << (std::filesystem::path(c.out) / "run_manifest.json").string() << '\n';
    return res.failed ? kExitTaskFailure : kExitOk;
  }

  if (*eval) {
    OwnedString table;
    if (auto st = gdir_eval(cfg.get(), c.out.c_str(), nullptr, &table.s); st != GDIR_OK) return report_failure(st);
    std::cout << table.str() << "report written to " << (std::filesystem::path(c.out) / "report.json").string()
              << '\n';
    return kExitOk;
  }

  // train
  gdir_train_result res{};
  const auto st = gdir_train(cfg.get(), c.suite.c_str(), c.out.c_str(), c.jobs,
                             resume.empty() ? nullptr : resume.c_str(), print_epoch, nullptr, &res);
  if (st != GDIR_OK) return report_failure(st);
  std::printf("trained %d epochs\n", res.epochs_run);
  std::printf("mean iterations before %.3f, after %.3f\n", res.iterations_before, res.iterations_after);
  std::printf("mean reward before %.4f, after %.4f\n", res.reward_before, res.reward_after);
  return kExitOk;
}
