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

#include "core/trajectory.hpp"

#include <sstream>

#include <json.hpp>

#include "core/error.hpp"

namespace gdir {
namespace {

using ojson = nlohmann::ordered_json;

constexpr std::array<std::string_view, 2> kGateNames = {"one_shot", "staged"};
constexpr std::array<std::string_view, 6> kStopNames = {"none",      "all_satisfied", "budget",
                                                        "self_query", "single_pass",  "error"};

ojson verdicts_json(const std::vector<Verdict>& verdicts) {
  ojson out = ojson::array();
  for (const auto& v : verdicts)
    out.push_back({{"goal_id", v.goal_id}, {"satisfied", v.satisfied}, {"confidence", v.confidence}});
  return out;
}

std::vector<Verdict> verdicts_from(const nlohmann::json& arr) {
  std::vector<Verdict> out;
  for (const auto& v : arr)
    out.push_back({v.at("goal_id").get<std::string>(), v.at("satisfied").get<bool>(),
                   v.at("confidence").get<double>(), v.value("explanation", std::string{})});
  return out;
}

ojson decision_json(const Decision& d) {
  ojson legal = ojson::array();
  for (auto a : d.legal) legal.push_back(to_string(a));
  return {{"kind", to_string(d.kind)},
          {"action", to_string(d.action)},
          {"features", d.features},
          {"legal", legal}};
}

Action parse_action(const nlohmann::json& j) {
  auto name = j.get<std::string>();
  auto a = action_from_string(name);
  if (!a) fail(ErrorCode::Parse, "unknown action '" + name + "' in trajectory");
  return *a;
}

Decision decision_from(const nlohmann::json& j) {
  Decision d;
  auto kind = decision_kind_from_string(j.at("kind").get<std::string>());
  if (!kind) fail(ErrorCode::Parse, "unknown decision kind in trajectory");
  d.kind = *kind;
  d.action = parse_action(j.at("action"));
  const auto& f = j.at("features");
  if (!f.is_array() || f.size() != kFeatureCount) fail(ErrorCode::Parse, "bad feature vector in trajectory");
  for (std::size_t i = 0; i < kFeatureCount; ++i) d.features[i] = f[i].get<double>();
  for (const auto& a : j.at("legal")) d.legal.push_back(parse_action(a));
  return d;
}

template <std::size_t N, typename Enum>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
  for (std::size_t i = 0; i < N; ++i)
    if (names[i] == s) return static_cast<Enum>(i);
  return std::nullopt;
}

}  // namespace

std::string_view to_string(GateDecision g) { return kGateNames[static_cast<std::size_t>(g)]; }
std::string_view to_string(StopReason r) { return kStopNames[static_cast<std::size_t>(r)]; }
std::optional<GateDecision> gate_from_string(std::string_view s) {
  return lookup<2, GateDecision>(kGateNames, s);
}
std::optional<StopReason> stop_reason_from_string(std::string_view s) {
  return lookup<6, StopReason>(kStopNames, s);
}

std::string step_to_json(const StepRecord& s) {
  ojson j;
  j["iteration"] = s.iteration;
  j["directive"] = s.directive.text;
  j["mode"] = to_string(s.directive.mode);
  j["addressed"] = s.directive.addressed_goal_ids;
  j["template"] = s.directive.template_id;
  j["reprompted"] = s.reprompted;
  j["base_image"] = s.base_image ? ojson(*s.base_image) : ojson(nullptr);
  j["candidate_seeds"] = s.candidate_seeds;
  j["judge_scores"] = s.judge_scores;
  j["chosen_index"] = s.chosen_index;
  j["chosen_image"] = s.chosen_image;
  j["verdicts"] = verdicts_json(s.verdicts);
  j["coverage"] = s.coverage;
  j["best_coverage"] = s.best_coverage;
  j["rollback"] = s.rollback;
  j["pending_after"] = s.pending_after;
  j["completed_after"] = s.completed_after;
  j["decisions"] = ojson::array();
  for (const auto& d : s.decisions) j["decisions"].push_back(decision_json(d));
  if (s.error) j["error"] = *s.error;
  return j.dump();
}

std::string terminal_to_json(const Trajectory& t) {
  ojson j;
  j["final"] = true;
  j["task_id"] = t.task_id;
  j["modality"] = to_string(t.modality);
  j["gate"] = to_string(t.gate);
  j["final_image"] = t.final_image;
  j["stop_reason"] = to_string(t.stop_reason);
  j["iterations"] = t.iterations;
  j["editor_calls"] = t.editor_calls;
  j["final_coverage"] = t.final_coverage;
  j["confidence_threshold"] = t.confidence_threshold;
  j["goals"] = ojson::array();
  for (const auto& g : t.goals)
    j["goals"].push_back({{"id", g.id}, {"goal_type", to_string(g.goal_type)}, {"tag", to_string(g.tag)}});
  j["final_verdicts"] = verdicts_json(t.final_verdicts);
  return j.dump();
}

Trajectory parse_trajectory(std::string_view jsonl) {
  Trajectory t;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      if (j.value("final", false)) {
        t.task_id = j.at("task_id").get<std::string>();
        t.modality = modality_from_string(j.at("modality").get<std::string>()).value_or(Modality::T2I);
        t.gate = gate_from_string(j.at("gate").get<std::string>()).value_or(GateDecision::Staged);
        t.final_image = j.at("final_image").get<std::string>();
        auto reason = stop_reason_from_string(j.at("stop_reason").get<std::string>());
        if (!reason) fail(ErrorCode::Parse, "unknown stop reason");
        t.stop_reason = *reason;
        t.iterations = j.at("iterations").get<int>();
        t.editor_calls = j.at("editor_calls").get<int>();
        t.final_coverage = j.at("final_coverage").get<int>();
        t.confidence_threshold = j.at("confidence_threshold").get<double>();
        for (const auto& g : j.at("goals")) {
          auto type = goal_type_from_string(g.at("goal_type").get<std::string>());
          auto tag = goal_tag_from_string(g.at("tag").get<std::string>());
          if (!type || !tag) fail(ErrorCode::Parse, "unknown goal type or tag");
          t.goals.push_back({g.at("id").get<std::string>(), *type, *tag});
        }
        t.final_verdicts = verdicts_from(j.at("final_verdicts"));
        continue;
      }
      StepRecord s;
      s.iteration = j.at("iteration").get<int>();
      s.directive.text = j.at("directive").get<std::string>();
      auto mode = directive_mode_from_string(j.at("mode").get<std::string>());
      if (!mode) fail(ErrorCode::Parse, "unknown directive mode");
      s.directive.mode = *mode;
      s.directive.addressed_goal_ids = j.at("addressed").get<std::vector<std::string>>();
      s.directive.template_id = j.at("template").get<int>();
      s.reprompted = j.at("reprompted").get<bool>();
      if (!j.at("base_image").is_null()) s.base_image = j.at("base_image").get<std::string>();
      s.candidate_seeds = j.at("candidate_seeds").get<std::vector<std::uint64_t>>();
      s.judge_scores = j.at("judge_scores").get<std::vector<double>>();
      s.chosen_index = j.at("chosen_index").get<int>();
      s.chosen_image = j.at("chosen_image").get<std::string>();
      s.verdicts = verdicts_from(j.at("verdicts"));
      s.coverage = j.at("coverage").get<int>();
      s.best_coverage = j.at("best_coverage").get<int>();
      s.rollback = j.at("rollback").get<bool>();
      s.pending_after = j.at("pending_after").get<std::vector<std::string>>();
      s.completed_after = j.at("completed_after").get<std::vector<std::string>>();
      for (const auto& d : j.at("decisions")) s.decisions.push_back(decision_from(d));
      if (j.contains("error")) s.error = j.at("error").get<std::string>();
      t.steps.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::Parse, "trajectory line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return t;
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  try {
    return parse_trajectory(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

TrajectoryWriter::TrajectoryWriter(const std::filesystem::path& path) : path_(path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) fail(ErrorCode::Io, "cannot write " + path.string());
}

void TrajectoryWriter::write_step(const StepRecord& step) {
  out_ << step_to_json(step) << '\n';
  out_.flush();
  if (!out_) fail(ErrorCode::Io, "write failed on " + path_.string());
}

void TrajectoryWriter::write_terminal(const Trajectory& traj) {
  out_ << terminal_to_json(traj) << '\n';
  out_.flush();
  if (!out_) fail(ErrorCode::Io, "write failed on " + path_.string());
}

}  // namespace gdir
