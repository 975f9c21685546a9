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

#include "core/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include <boost/program_options.hpp>
#include <openssl/evp.h>

#include "core/error.hpp"
#include "core/task.hpp"

namespace po = boost::program_options;

namespace gdir {
namespace {

BackendKind backend_kind(const std::string& role, const std::string& v) {
  if (v == "sim") return BackendKind::Sim;
  if (v == "http") return BackendKind::Http;
  fail(ErrorCode::Config, "backend." + role + " must be 'sim' or 'http', got '" + v + "'");
}

std::string kind_name(BackendKind k) { return k == BackendKind::Sim ? "sim" : "http"; }

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Raw {
  std::string planner, editor, verifier, judge;
  std::string tasks, output, prompts;
  std::uint64_t sim_seed = 0, run_seed = 0, train_seed = 0;
  int max_in_flight = 4;
  bool reprompting = true, best_of_n = true, refinement = true, std_normalize = true;
};

po::options_description describe(AppConfig& c, Raw& r) {
  po::options_description d;
  d.add_options()
      ("backend.planner", po::value(&r.planner)->default_value("sim"))
      ("backend.editor", po::value(&r.editor)->default_value("sim"))
      ("backend.verifier", po::value(&r.verifier)->default_value("sim"))
      ("backend.judge", po::value(&r.judge)->default_value("sim"))
      ("http.base_url", po::value(&c.http.base_url)->default_value(""))
      ("http.planner_model", po::value(&c.http.planner_model)->default_value(""))
      ("http.editor_model", po::value(&c.http.editor_model)->default_value(""))
      ("http.verifier_model", po::value(&c.http.verifier_model)->default_value(""))
      ("http.judge_model", po::value(&c.http.judge_model)->default_value(""))
      ("http.temperature", po::value(&c.http.temperature)->default_value(0.0))
      ("http.timeout_s", po::value(&c.http.timeout_s)->default_value(120.0))
      ("sim.p_success", po::value(&c.sim.p_success)->default_value(0.7))
      ("sim.p_side_effect", po::value(&c.sim.p_side_effect)->default_value(0.1))
      ("sim.verifier_noise", po::value(&c.sim.verifier_noise)->default_value(0.05))
      ("sim.i2i_presatisfied", po::value(&c.sim.i2i_presatisfied)->default_value(0.0))
      ("sim.seed", po::value(&r.sim_seed)->default_value(0))
      ("run.max_iterations", po::value(&c.run.max_iterations)->default_value(6))
      ("run.microgrid_t2i", po::value(&c.run.microgrid_t2i)->default_value(4))
      ("run.microgrid_i2i", po::value(&c.run.microgrid_i2i)->default_value(1))
      ("run.confidence_threshold", po::value(&c.run.confidence_threshold)->default_value(0.81))
      ("run.one_shot_feasibility_gate", po::value(&c.run.one_shot_feasibility_gate)->default_value(0.7))
      ("run.one_shot_goal_cap", po::value(&c.run.one_shot_goal_cap)->default_value(15))
      ("run.self_query_cadence", po::value(&c.run.self_query_cadence)->default_value(2))
      ("run.self_query_threshold", po::value(&c.run.self_query_threshold)->default_value(0.5))
      ("run.reprompting", po::value(&r.reprompting)->default_value(true))
      ("run.best_of_n", po::value(&r.best_of_n)->default_value(true))
      ("run.refinement", po::value(&r.refinement)->default_value(true))
      ("run.max_in_flight", po::value(&r.max_in_flight)->default_value(4))
      ("run.seed", po::value(&r.run_seed)->default_value(0))
      ("train.group_size", po::value(&c.train.group_size)->default_value(8))
      ("train.epochs", po::value(&c.train.epochs)->default_value(200))
      ("train.step_size", po::value(&c.train.step_size)->default_value(2.0))
      ("train.clip_eps", po::value(&c.train.clip_eps)->default_value(0.2))
      ("train.beta", po::value(&c.train.beta)->default_value(0.01))
      ("train.seed", po::value(&r.train_seed)->default_value(0))
      ("train.std_normalize", po::value(&r.std_normalize)->default_value(true))
      ("train.temperature", po::value(&c.train.temperature)->default_value(1.0))
      ("paths.tasks", po::value(&r.tasks)->default_value("tasks"))
      ("paths.output", po::value(&r.output)->default_value("out"))
      ("paths.prompts", po::value(&r.prompts)->default_value("prompts"));
  return d;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return (path.is_absolute() || base.empty() ? path : base / path).lexically_normal();
}

}  // namespace

bool BackendSelection::all_sim() const {
  return planner == BackendKind::Sim && editor == BackendKind::Sim && verifier == BackendKind::Sim &&
         judge == BackendKind::Sim;
}

bool BackendSelection::any_http() const { return !all_sim(); }

AppConfig parse_config(std::string_view text, const Overrides& overrides, const std::filesystem::path& base_dir) {
  AppConfig c;
  Raw r;
  const auto desc = describe(c, r);
  po::variables_map vm;
  try {
    // The first stored value of an option wins, so overrides go in first.
    std::ostringstream ov;
    for (const auto& [k, v] : overrides) {
      if (!desc.find_nothrow(k, false)) fail(ErrorCode::Config, "unknown config key '" + k + "'");
      ov << k << " = " << v << '\n';
    }
    std::istringstream ov_in(ov.str());
    po::store(po::parse_config_file(ov_in, desc), vm);
    std::istringstream in{std::string(text)};
    po::store(po::parse_config_file(in, desc), vm);
    po::notify(vm);
  } catch (const po::error& e) {
    fail(ErrorCode::Config, std::string("config: ") + e.what());
  }
  c.backends = {backend_kind("planner", r.planner), backend_kind("editor", r.editor),
                backend_kind("verifier", r.verifier), backend_kind("judge", r.judge)};
  c.sim.seed = r.sim_seed;
  c.run.seed = r.run_seed;
  c.train.seed = r.train_seed;
  if (r.max_in_flight < 1) fail(ErrorCode::Config, "run.max_in_flight must be at least 1");
  c.run.max_in_flight = static_cast<std::size_t>(r.max_in_flight);
  c.run.strategies = {r.reprompting, r.best_of_n, r.refinement};
  c.train.std_normalize = r.std_normalize;
  c.paths.tasks = resolve(base_dir, r.tasks);
  c.paths.output = resolve(base_dir, r.output);
  c.paths.prompts = resolve(base_dir, r.prompts);
  c.http.prompts_dir = c.paths.prompts;
  c.http.image_dir = c.paths.output / "images";
  c.http.max_in_flight = c.run.max_in_flight;
  return c;
}

AppConfig load_config(const std::optional<std::filesystem::path>& path, const Overrides& overrides) {
  std::string text;
  std::filesystem::path base;
  if (path) {
    if (!std::filesystem::is_regular_file(*path)) fail(ErrorCode::Config, "config file not found: " + path->string());
    text = read_file(*path);
    base = path->parent_path();
  }
  auto c = parse_config(text, overrides, base);
  if (const char* key = std::getenv("VD_API_KEY")) c.http.api_key = key;
  c.validate();
  return c;
}

void AppConfig::validate() const {
  try {
    sim.validate();
    run.validate();
    train.validate();
  } catch (const Error& e) {
    fail(ErrorCode::Config, e.what());
  }
  if (backends.any_http()) {
    if (http.base_url.empty()) fail(ErrorCode::Config, "http backends need http.base_url");
    if (http.api_key.empty()) fail(ErrorCode::Config, "http backends need the VD_API_KEY environment variable");
    if (!(http.timeout_s > 0.0)) fail(ErrorCode::Config, "http.timeout_s must be positive");
    const bool needs_prompts = backends.planner == BackendKind::Http || backends.verifier == BackendKind::Http ||
                               backends.judge == BackendKind::Http;
    if (needs_prompts && !std::filesystem::is_directory(paths.prompts))
      fail(ErrorCode::Config, "prompt directory not found: " + paths.prompts.string());
  }
}

std::string AppConfig::canonical() const {
  std::map<std::string, std::string> kv = {
      {"backend.planner", kind_name(backends.planner)},
      {"backend.editor", kind_name(backends.editor)},
      {"backend.verifier", kind_name(backends.verifier)},
      {"backend.judge", kind_name(backends.judge)},
      {"http.base_url", http.base_url},
      {"http.planner_model", http.planner_model},
      {"http.editor_model", http.editor_model},
      {"http.verifier_model", http.verifier_model},
      {"http.judge_model", http.judge_model},
      {"http.temperature", num(http.temperature)},
      {"http.timeout_s", num(http.timeout_s)},
      {"sim.p_success", num(sim.p_success)},
      {"sim.p_side_effect", num(sim.p_side_effect)},
      {"sim.verifier_noise", num(sim.verifier_noise)},
      {"sim.i2i_presatisfied", num(sim.i2i_presatisfied)},
      {"sim.seed", std::to_string(sim.seed)},
      {"run.max_iterations", std::to_string(run.max_iterations)},
      {"run.microgrid_t2i", std::to_string(run.microgrid_t2i)},
      {"run.microgrid_i2i", std::to_string(run.microgrid_i2i)},
      {"run.confidence_threshold", num(run.confidence_threshold)},
      {"run.one_shot_feasibility_gate", num(run.one_shot_feasibility_gate)},
      {"run.one_shot_goal_cap", std::to_string(run.one_shot_goal_cap)},
      {"run.self_query_cadence", std::to_string(run.self_query_cadence)},
      {"run.self_query_threshold", num(run.self_query_threshold)},
      {"run.reprompting", run.strategies.reprompting ? "true" : "false"},
      {"run.best_of_n", run.strategies.best_of_n ? "true" : "false"},
      {"run.refinement", run.strategies.refinement ? "true" : "false"},
      {"run.max_in_flight", std::to_string(run.max_in_flight)},
      {"run.seed", std::to_string(run.seed)},
      {"train.group_size", std::to_string(train.group_size)},
      {"train.epochs", std::to_string(train.epochs)},
      {"train.step_size", num(train.step_size)},
      {"train.clip_eps", num(train.clip_eps)},
      {"train.beta", num(train.beta)},
      {"train.seed", std::to_string(train.seed)},
      {"train.std_normalize", train.std_normalize ? "true" : "false"},
      {"train.temperature", num(train.temperature)},
  };
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorCode::Io, "SHA-256 digest failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::string AppConfig::hash() const { return sha256_hex(canonical()); }

}  // namespace gdir
