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

#include "core/http_backends.hpp"

#include <cstdio>
#include <sstream>

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/trajectory.hpp"

namespace gdir {
namespace {

using nlohmann::json;

Endpoint endpoint_for(const HttpSettings& s, const std::string& role) {
  if (s.base_url.empty()) fail(ErrorCode::Config, "http." + role + ": base_url is not set");
  return {role, s.base_url, s.api_key, s.timeout_s};
}

ChatRequest request(const std::string& model, double temperature, std::string prompt,
                    std::vector<std::string> images = {}) {
  return {model, {{"user", std::move(prompt), std::move(images)}}, temperature};
}

std::string check_unit(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) return std::string("missing number '") + key + "'";
  const double v = j[key].get<double>();
  if (!(v >= 0.0 && v <= 1.0)) return std::string("'") + key + "' outside [0, 1]";
  return {};
}

std::string mode_hint(DirectiveMode m) {
  switch (m) {
    case DirectiveMode::FullCompose:
      return "compose the whole image";
    case DirectiveMode::Regenerate:
      return "regenerate the scene, keeping satisfied goals";
    default:
      return "make a local, inpainting-style edit";
  }
}

}  // namespace

std::string describe_goals(std::span<const Goal> goals) {
  std::ostringstream out;
  for (const auto& g : goals)
    out << "- " << g.id << " [" << to_string(g.goal_type) << ", " << to_string(g.tag) << "]: " << g.text << '\n';
  return out.str();
}

std::string image_data_url(const Image& image) {
  if (image.ref.empty() || !std::filesystem::exists(image.ref))
    fail(ErrorCode::Backend, "image '" + image.ref + "' is not a readable file");
  return "data:image/png;base64," + base64_encode(read_file(image.ref));
}

HttpPlanner::HttpPlanner(const HttpSettings& s)
    : client_(endpoint_for(s, "planner")), prompts_(s.prompts_dir), model_(s.planner_model),
      temperature_(s.temperature) {}

ExtractedPlan HttpPlanner::plan_goals(std::string_view instruction, const std::optional<std::string>& source_image) {
  const auto prompt = prompts_.render(
      "planner_goals", {{"instruction", std::string(instruction)}, {"has_source", source_image ? "yes" : "no"}});
  const auto doc = complete_structured(client_, request(model_, temperature_, prompt), [&](const json& j) {
    if (auto p = check_unit(j, "one_shot_feasibility"); !p.empty()) return p;
    if (!j.contains("goals") || !j["goals"].is_array() || j["goals"].empty()) return std::string("missing goals");
    for (const auto& g : j["goals"]) {
      const auto text = g.at("text").get<std::string>();
      if (text.empty() || instruction.find(text) == std::string_view::npos)
        return "goal text '" + text + "' is not a verbatim clause of the instruction";
      if (!goal_type_from_string(g.at("goal_type").get<std::string>())) return std::string("unknown goal_type");
      if (!goal_tag_from_string(g.at("tag").get<std::string>())) return std::string("unknown tag");
    }
    return std::string();
  });
  ExtractedPlan plan;
  plan.one_shot_feasibility = doc["one_shot_feasibility"].get<double>();
  for (const auto& g : doc["goals"]) {
    Goal goal;
    goal.id = "g" + std::to_string(plan.goals.size() + 1);
    goal.text = g["text"].get<std::string>();
    goal.goal_type = *goal_type_from_string(g["goal_type"].get<std::string>());
    goal.tag = *goal_tag_from_string(g["tag"].get<std::string>());
    goal.strength = std::clamp(g.value("strength", 50.0), 0.0, 100.0);
    goal.conflict = g.value("conflict", false);
    plan.goals.push_back(std::move(goal));
  }
  return plan;
}

std::string HttpPlanner::directive(std::span<const Goal> goals, DirectiveMode mode, int template_id,
                                   const std::string& previous) {
  const auto prompt = prompts_.render(previous.empty() ? "planner_directive" : "planner_reprompt",
                                      {{"goals", describe_goals(goals)},
                                       {"mode", mode_hint(mode)},
                                       {"style", std::to_string(template_id)},
                                       {"previous", previous}});
  const auto doc = complete_structured(client_, request(model_, temperature_, prompt), [&](const json& j) {
    if (!j.contains("directive") || !j["directive"].is_string() || j["directive"].get<std::string>().empty())
      return std::string("missing directive text");
    if (!previous.empty() && j["directive"].get<std::string>() == previous)
      return std::string("the directive repeats the failed one");
    return std::string();
  });
  return doc["directive"].get<std::string>();
}

Directive HttpPlanner::propose_directive(const GoalLedger& ledger, std::span<const Goal> batch, const Trajectory&,
                                         int template_id) {
  Directive d;
  d.mode = choose_mode(ledger, batch, true);
  d.template_id = template_id;
  for (const auto& g : batch) d.addressed_goal_ids.push_back(g.id);
  d.text = directive(batch, d.mode, template_id, "");
  return d;
}

Directive HttpPlanner::compose_directive(std::span<const Goal> goals, bool, int template_id) {
  Directive d;
  d.mode = DirectiveMode::FullCompose;
  d.template_id = template_id;
  for (const auto& g : goals) d.addressed_goal_ids.push_back(g.id);
  d.text = directive(goals, d.mode, template_id, "");
  return d;
}

Directive HttpPlanner::reprompt(std::span<const Goal> failed_batch, const Directive& previous, const Trajectory&) {
  Directive d = previous;
  d.text = directive(failed_batch, previous.mode, previous.template_id, previous.text);
  return d;
}

double HttpPlanner::improvement_confidence(const GoalLedger& ledger, const Trajectory& history) {
  std::ostringstream pending;
  for (const auto& id : ledger.pending()) pending << id << ' ';
  const auto prompt = prompts_.render("planner_self_query", {{"pending", pending.str()},
                                                            {"iterations", std::to_string(history.steps.size())}});
  const auto doc = complete_structured(client_, request(model_, temperature_, prompt),
                                       [](const json& j) { return check_unit(j, "confidence"); });
  return doc["confidence"].get<double>();
}

HttpEditor::HttpEditor(const HttpSettings& s, const Task& task, const std::filesystem::path& task_dir)
    : client_(endpoint_for(s, "editor")), model_(s.editor_model), out_dir_(s.image_dir / task.id),
      max_in_flight_(s.max_in_flight) {
  if (task.source_image) source_ = task_dir / *task.source_image;
}

std::optional<Image> HttpEditor::source_image() {
  if (!source_) return std::nullopt;
  return Image{source_->string(), nullptr};
}

std::vector<Candidate> HttpEditor::render(const Directive& directive, const std::optional<Image>& base,
                                          std::span<const std::uint64_t> seeds) {
  std::filesystem::create_directories(out_dir_);
  const std::string base_url = base ? image_data_url(*base) : "";
  std::vector<Candidate> out(seeds.size());
  parallel_for(seeds.size(), max_in_flight_, [&](std::size_t i) {
    json body = {{"model", model_}, {"prompt", directive.text}, {"n", 1},
                 {"seed", seeds[i]},  {"mode", to_string(directive.mode)}, {"response_format", "b64_json"}};
    if (!base_url.empty()) body["image"] = base_url;
    const auto res = client_.post_json("/images/generations", body);
    std::string b64;
    try {
      b64 = res.at("data").at(0).at("b64_json").get<std::string>();
    } catch (const json::exception&) {
      fail(ErrorCode::Backend, "endpoint editor: response has no data[0].b64_json");
    }
    char name[40];
    std::snprintf(name, sizeof name, "%016llx.png", static_cast<unsigned long long>(seeds[i]));
    const auto path = out_dir_ / name;
    write_file(path, base64_decode(b64));
    out[i].seed = seeds[i];
    out[i].image = Image{path.string(), nullptr};
  });
  return out;
}

HttpVerifier::HttpVerifier(const HttpSettings& s)
    : client_(endpoint_for(s, "verifier")), prompts_(s.prompts_dir), model_(s.verifier_model),
      temperature_(s.temperature) {}

std::vector<Verdict> HttpVerifier::evaluate(const Image& image, std::span<const Goal> goals) {
  const auto prompt = prompts_.render("verifier", {{"goals", describe_goals(goals)}});
  const auto doc =
      complete_structured(client_, request(model_, temperature_, prompt, {image_data_url(image)}), [&](const json& j) {
        if (!j.contains("verdicts") || !j["verdicts"].is_array()) return std::string("missing verdicts");
        if (j["verdicts"].size() != goals.size()) return std::string("expected one verdict per goal");
        for (std::size_t i = 0; i < goals.size(); ++i) {
          const auto& v = j["verdicts"][i];
          if (v.at("goal_id").get<std::string>() != goals[i].id) return std::string("verdicts out of goal order");
          if (!v.at("satisfied").is_boolean()) return std::string("'satisfied' must be a boolean");
          if (auto p = check_unit(v, "confidence"); !p.empty()) return p;
        }
        return std::string();
      });
  std::vector<Verdict> out;
  for (const auto& v : doc["verdicts"])
    out.push_back({v["goal_id"].get<std::string>(), v["satisfied"].get<bool>(), v["confidence"].get<double>(),
                   v.value("explanation", "")});
  return out;
}

HttpJudge::HttpJudge(const HttpSettings& s)
    : client_(endpoint_for(s, "judge")), prompts_(s.prompts_dir), model_(s.judge_model), temperature_(s.temperature) {}

std::vector<double> HttpJudge::score(std::span<const Candidate> candidates, std::span<const Goal> goals_in_scope) {
  std::vector<std::string> images;
  for (const auto& c : candidates) images.push_back(image_data_url(c.image));
  const auto prompt = prompts_.render(
      "judge", {{"goals", describe_goals(goals_in_scope)}, {"count", std::to_string(candidates.size())}});
  const auto doc = complete_structured(client_, request(model_, temperature_, prompt, images), [&](const json& j) {
    if (!j.contains("scores") || !j["scores"].is_array()) return std::string("missing scores");
    if (j["scores"].size() != candidates.size()) return std::string("expected one score per candidate");
    for (const auto& s : j["scores"])
      if (!s.is_number() || s.get<double>() < 0.0 || s.get<double>() > 5.0) return std::string("score outside [0, 5]");
    return std::string();
  });
  return doc["scores"].get<std::vector<double>>();
}

}  // namespace gdir
