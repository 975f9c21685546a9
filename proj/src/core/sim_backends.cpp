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

#include "core/sim_backends.hpp"

#include <algorithm>

#include "core/actions.hpp"
#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace gdir {
namespace {

bool contains_any(std::string_view text, std::initializer_list<std::string_view> words) {
  return std::any_of(words.begin(), words.end(),
                     [&](std::string_view w) { return text.find(w) != std::string_view::npos; });
}

GoalTag default_tag(GoalType t) {
  switch (t) {
    case GoalType::Text:
      return GoalTag::TextOverlay;
    case GoalType::Composition:
      return GoalTag::Layout;
    case GoalType::Color:
    case GoalType::Lighting:
      return GoalTag::Global;
    default:
      return GoalTag::Local;
  }
}

const Canvas& canvas_of(const Image& image) {
  if (!image.canvas) fail(ErrorCode::Backend, "simulated backend received a non-simulated image: " + image.ref);
  return *image.canvas;
}

}  // namespace

GoalType classify_clause(std::string_view c) {
  if (contains_any(c, {"overlay", "caption", "title", " text", "font", "signature", "engrave", "write "}))
    return GoalType::Text;
  if (contains_any(c, {"camera", "frame ", "third", "negative space", "horizon line", "arrange", "layout",
                       "composition", "center the"}))
    return GoalType::Composition;
  if (contains_any(c, {"color", "colour", "palette", "saturation", "tint", "hue", "paint "}))
    return GoalType::Color;
  if (contains_any(c, {"light", "shadow", "brightness", "illuminat"})) return GoalType::Lighting;
  if (contains_any(c, {"grain", "fog", "blur", "particles", "vignette", "glow ", "haze", "effect"}))
    return GoalType::Effect;
  return GoalType::AddObject;
}

ExtractedPlan SimPlanner::plan_goals(std::string_view instruction, const std::optional<std::string>&) {
  ExtractedPlan plan;
  std::size_t start = 0;
  while (start <= instruction.size()) {
    auto end = instruction.find("; ", start);
    if (end == std::string_view::npos) end = instruction.size();
    auto clause = instruction.substr(start, end - start);
    if (!clause.empty()) {
      Goal g;
      g.id = "g" + std::to_string(plan.goals.size() + 1);
      g.text = std::string(clause);
      g.goal_type = classify_clause(clause);
      g.tag = default_tag(g.goal_type);
      plan.goals.push_back(std::move(g));
    }
    start = end + 2;
  }
  flag_conflicts(plan.goals);
  plan.one_shot_feasibility = std::clamp(1.0 - static_cast<double>(plan.goals.size()) / 30.0, 0.0, 1.0);
  return plan;
}

Directive SimPlanner::propose_directive(const GoalLedger& ledger, std::span<const Goal> batch, const Trajectory&,
                                        int template_id) {
  Directive d;
  d.mode = choose_mode(ledger, batch, true);
  d.template_id = template_id;
  d.text = directive_text(template_id, d.mode, batch);
  for (const auto& g : batch) d.addressed_goal_ids.push_back(g.id);
  return d;
}

Directive SimPlanner::compose_directive(std::span<const Goal> goals, bool, int template_id) {
  Directive d;
  d.mode = DirectiveMode::FullCompose;
  d.template_id = template_id;
  d.text = directive_text(template_id, d.mode, goals);
  for (const auto& g : goals) d.addressed_goal_ids.push_back(g.id);
  return d;
}

Directive SimPlanner::reprompt(std::span<const Goal> failed_batch, const Directive& previous, const Trajectory&) {
  Directive d = previous;
  d.template_id = (previous.template_id + 1) % static_cast<int>(kTemplateCount);
  d.text = directive_text(d.template_id, d.mode, failed_batch);
  return d;
}

double SimPlanner::improvement_confidence(const GoalLedger& ledger, const Trajectory&) {
  const auto pending = static_cast<double>(ledger.pending().size());
  return pending / (pending + 1.0);
}

SimEditor::SimEditor(const Task& task, const SimConfig& cfg, std::size_t max_in_flight)
    : world_(task, cfg), i2i_(task.modality == Modality::I2I), max_in_flight_(max_in_flight) {}

std::optional<Image> SimEditor::source_image() {
  if (!i2i_) return std::nullopt;
  const auto& c = world_.initial_canvas();
  return Image{c.ref(world_.task_id()), std::make_shared<const Canvas>(c)};
}

std::vector<Candidate> SimEditor::render(const Directive& directive, const std::optional<Image>& base,
                                         std::span<const std::uint64_t> seeds) {
  const Canvas& start = base ? canvas_of(*base) : world_.initial_canvas();
  std::vector<Candidate> out(seeds.size());
  parallel_for(seeds.size(), max_in_flight_, [&](std::size_t i) {
    SimWorld clone = world_.at(start);
    const auto& canvas = clone.apply_edit(directive.addressed_goal_ids, seeds[i]);
    out[i].seed = seeds[i];
    out[i].image = Image{canvas.ref(world_.task_id()), std::make_shared<const Canvas>(canvas)};
  });
  return out;
}

SimVerifier::SimVerifier(const Task& task, const SimConfig& cfg)
    : key_(mix(fnv1a("sim-verifier"), {cfg.seed, fnv1a(task.id)})), noise_(cfg.verifier_noise) {}

std::vector<Verdict> SimVerifier::evaluate(const Image& image, std::span<const Goal> goals) {
  const Canvas& canvas = canvas_of(image);
  std::vector<Verdict> out;
  out.reserve(goals.size());
  for (const auto& g : goals) {
    const bool truth = canvas.satisfied(g.id);
    const auto key = mix(key_, {canvas.lineage, fnv1a(g.id)});
    const bool flipped = unit_interval(mix(key, 1)) < noise_;
    const double u = unit_interval(mix(key, 2));
    Verdict v;
    v.goal_id = g.id;
    v.satisfied = truth != flipped;
    if (noise_ == 0.0)
      v.confidence = 1.0;
    else
      v.confidence = flipped ? 0.55 + 0.4 * u : 1.0 - 0.15 * u;
    v.explanation = std::string("simulated check: ") + (truth ? "present" : "absent") + (flipped ? ", misread" : "");
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<double> SimJudge::score(std::span<const Candidate> candidates, std::span<const Goal> goals_in_scope) {
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const auto& c : candidates) {
    const Canvas& canvas = canvas_of(c.image);
    double sum = 0.0;
    for (const auto& g : goals_in_scope) {
      const auto& attr = canvas.attributes[canvas.index_of(g.id)];
      if (attr.satisfied) sum += 0.8 + 0.2 * attr.quality;
    }
    scores.push_back(goals_in_scope.empty() ? 0.0 : 5.0 * sum / static_cast<double>(goals_in_scope.size()));
  }
  return scores;
}

Backends make_sim_backends(const Task& task, const SimConfig& cfg, std::size_t max_in_flight) {
  Backends b;
  b.planner = std::make_unique<SimPlanner>();
  b.editor = std::make_unique<SimEditor>(task, cfg, max_in_flight);
  b.verifier = std::make_unique<SimVerifier>(task, cfg);
  b.judge = std::make_unique<SimJudge>();
  return b;
}

Backends SimBackendFactory::make(const Task& task, const std::filesystem::path&) const {
  return make_sim_backends(task, cfg_, max_in_flight_);
}

}  // namespace gdir
