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

#include "core/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include <json.hpp>

#include "core/error.hpp"

namespace gdir {
namespace {

std::size_t type_index(GoalType t) { return static_cast<std::size_t>(t); }

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

}  // namespace

std::vector<Verdict> filter_verdicts(std::span<const Verdict> verdicts, double threshold) {
  std::vector<Verdict> out(verdicts.begin(), verdicts.end());
  for (auto& v : out)
    if (v.confidence < threshold) v.satisfied = false;
  return out;
}

int count_satisfied(std::span<const Verdict> verdicts) {
  return static_cast<int>(std::count_if(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.satisfied; }));
}

std::string_view to_string(Label l) {
  switch (l) {
    case Label::Success:
      return "success";
    case Label::Partial:
      return "partial";
    default:
      return "failure";
  }
}

Label label_for(int satisfied, int total) {
  if (satisfied == 0) return Label::Failure;
  // Integer form of satisfied / total >= 0.8, immune to rounding.
  if (5 * satisfied >= 4 * total) return Label::Success;
  return Label::Partial;
}

TaskScore score_task(const GoalLedger& ledger, const Trajectory& traj, double threshold) {
  TaskScore s;
  s.task_id = traj.task_id;
  s.iterations = traj.iterations;
  s.editor_calls = traj.editor_calls;
  std::map<std::string, bool> passed;
  for (const auto& v : filter_verdicts(traj.final_verdicts, threshold)) passed[v.goal_id] = v.satisfied;
  for (const auto& g : ledger.goals()) {
    auto& tc = s.per_type[type_index(g.goal_type)];
    ++tc.total;
    ++s.total_goals;
    auto it = passed.find(g.id);
    if (it != passed.end() && it->second) {
      ++tc.satisfied;
      ++s.effective_satisfied;
    }
  }
  s.finish_fraction = s.total_goals ? static_cast<double>(s.effective_satisfied) / s.total_goals : 0.0;
  s.label = label_for(s.effective_satisfied, s.total_goals);
  return s;
}

TaskScore score_task(const Trajectory& traj, double threshold) {
  return score_task(GoalLedger(traj.goals), traj, threshold);
}

BenchReport aggregate(std::span<const TaskScore> scores) {
  if (scores.empty()) fail(ErrorCode::InvalidArgument, "no task scores to aggregate");
  BenchReport r;
  r.tasks = static_cast<int>(scores.size());
  std::vector<int> iters;
  double macro = 0.0, calls = 0.0;
  for (const auto& s : scores) {
    r.satisfied += s.effective_satisfied;
    r.goals += s.total_goals;
    macro += s.finish_fraction;
    calls += s.editor_calls;
    iters.push_back(s.iterations);
    switch (s.label) {
      case Label::Success:
        ++r.success;
        break;
      case Label::Partial:
        ++r.partial;
        break;
      case Label::Failure:
        ++r.failure;
        break;
    }
    for (std::size_t t = 0; t < r.per_type.size(); ++t) {
      r.per_type[t].satisfied += s.per_type[t].satisfied;
      r.per_type[t].total += s.per_type[t].total;
    }
  }
  const double n = static_cast<double>(r.tasks);
  r.finish = r.goals ? static_cast<double>(r.satisfied) / r.goals : 0.0;
  r.finish_macro = macro / n;
  r.success_rate = r.success / n;
  for (std::size_t t = 0; t < r.per_type.size(); ++t)
    if (r.per_type[t].total)
      r.per_type_rate[t] = static_cast<double>(r.per_type[t].satisfied) / r.per_type[t].total;
  double sum = 0.0;
  for (int i : iters) sum += i;
  r.mean_iterations = sum / n;
  std::sort(iters.begin(), iters.end());
  const auto mid = iters.size() / 2;
  r.median_iterations = iters.size() % 2 ? iters[mid] : (iters[mid - 1] + iters[mid]) / 2.0;
  r.mean_editor_calls = calls / n;
  return r;
}

std::string report_to_json(const BenchReport& r) {
  nlohmann::ordered_json j;
  j["tasks"] = r.tasks;
  j["finish"] = r.finish;
  j["finish_macro"] = r.finish_macro;
  j["success_rate_ge80"] = r.success_rate;
  j["labels"] = {{"success", r.success}, {"partial", r.partial}, {"failure", r.failure}};
  j["goals"] = {{"satisfied", r.satisfied}, {"total", r.goals}};
  auto& types = j["per_type"] = nlohmann::ordered_json::object();
  for (std::size_t t = 0; t < kGoalTypes.size(); ++t) {
    types[std::string(to_string(kGoalTypes[t]))] = {
        {"satisfied", r.per_type[t].satisfied},
        {"total", r.per_type[t].total},
        {"rate", r.per_type_rate[t] ? nlohmann::ordered_json(*r.per_type_rate[t]) : nlohmann::ordered_json(nullptr)}};
  }
  j["mean_iterations"] = r.mean_iterations;
  j["median_iterations"] = r.median_iterations;
  j["mean_editor_calls"] = r.mean_editor_calls;
  return j.dump(2) + "\n";
}

BenchReport report_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    BenchReport r;
    r.tasks = j.at("tasks").get<int>();
    r.finish = j.at("finish").get<double>();
    r.finish_macro = j.at("finish_macro").get<double>();
    r.success_rate = j.at("success_rate_ge80").get<double>();
    r.success = j.at("labels").at("success").get<int>();
    r.partial = j.at("labels").at("partial").get<int>();
    r.failure = j.at("labels").at("failure").get<int>();
    r.satisfied = j.at("goals").at("satisfied").get<int>();
    r.goals = j.at("goals").at("total").get<int>();
    for (std::size_t t = 0; t < kGoalTypes.size(); ++t) {
      const auto& e = j.at("per_type").at(std::string(to_string(kGoalTypes[t])));
      r.per_type[t] = {e.at("satisfied").get<int>(), e.at("total").get<int>()};
      if (!e.at("rate").is_null()) r.per_type_rate[t] = e.at("rate").get<double>();
    }
    r.mean_iterations = j.at("mean_iterations").get<double>();
    r.median_iterations = j.at("median_iterations").get<double>();
    r.mean_editor_calls = j.at("mean_editor_calls").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("malformed report: ") + e.what());
  }
}

std::string render_table(const BenchReport& r) {
  const std::vector<std::string> head = {"Finish", "Success>=80%", "AddObject", "Text",  "Effect",
                                         "Color",  "Lighting",     "Composition", "Iters", "Edits"};
  std::vector<std::string> row = {fmt("%.4f", r.finish), fmt("%.4f", r.success_rate)};
  for (const auto& rate : r.per_type_rate) row.push_back(rate ? fmt("%.4f", *rate) : "-");
  row.push_back(fmt("%.2f", r.mean_iterations));
  row.push_back(fmt("%.2f", r.mean_editor_calls));
  std::ostringstream out;
  for (std::size_t i = 0; i < head.size(); ++i) {
    const auto w = std::max(head[i].size(), row[i].size());
    out << (i ? "  " : "") << std::string(w - head[i].size(), ' ') << head[i];
  }
  out << '\n';
  for (std::size_t i = 0; i < head.size(); ++i) {
    const auto w = std::max(head[i].size(), row[i].size());
    out << (i ? "  " : "") << std::string(w - row[i].size(), ' ') << row[i];
  }
  out << '\n'
      << "tasks " << r.tasks << ", goals " << r.satisfied << "/" << r.goals << ", macro finish "
      << fmt("%.4f", r.finish_macro) << ", labels " << r.success << "/" << r.partial << "/" << r.failure
      << " (success/partial/failure), median iterations " << fmt("%.1f", r.median_iterations) << '\n';
  return out.str();
}

}  // namespace gdir
