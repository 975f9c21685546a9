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

#include <array>
#include <cstdio>
#include <random>
#include <set>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "core/sim_world.hpp"

namespace gdir {
namespace {

struct ClauseTemplate {
  GoalType type;
  GoalTag tag;
  const char* pattern;
};

// Each template appears at most once per task, so generated instructions never
// carry two clauses that differ only in a numeric parameter.
constexpr ClauseTemplate kTemplates[] = {
    {GoalType::AddObject, GoalTag::Local, "add a {color} {object} in the {region}"},
    {GoalType::AddObject, GoalTag::Local, "place a small {object} on the {surface}"},
    {GoalType::AddObject, GoalTag::Local, "insert a flock of {animal}s near the horizon"},
    {GoalType::AddObject, GoalTag::Local, "add a {material} statue beside the main subject"},
    {GoalType::AddObject, GoalTag::Local, "include a {color} umbrella held by the main character"},
    {GoalType::AddObject, GoalTag::Local, "add a {object} partially hidden behind foliage"},
    {GoalType::AddObject, GoalTag::Local, "scatter {count} lanterns across the foreground"},
    {GoalType::AddObject, GoalTag::Local, "add a glowing orb floating above the {surface}"},
    {GoalType::AddObject, GoalTag::Local, "add a {animal} resting in the {region}"},
    {GoalType::AddObject, GoalTag::Local, "add a {material} bench under the tree"},
    {GoalType::Text, GoalTag::TextOverlay, "overlay {WORD} text in {font} font"},
    {GoalType::Text, GoalTag::TextOverlay, "add the caption {WORD} along the bottom edge"},
    {GoalType::Text, GoalTag::TextOverlay, "write {WORD} on a {color} banner"},
    {GoalType::Text, GoalTag::TextOverlay, "render the title {WORD} at {size} pt"},
    {GoalType::Text, GoalTag::TextOverlay, "place a small signature {WORD} in the lower right corner"},
    {GoalType::Text, GoalTag::TextOverlay, "engrave {WORD} on the {material} plaque"},
    {GoalType::Effect, GoalTag::Global, "apply a soft film grain at {pct}% intensity"},
    {GoalType::Effect, GoalTag::Local, "add light fog drifting through the {region}"},
    {GoalType::Effect, GoalTag::Global, "add a shallow depth-of-field blur to the background"},
    {GoalType::Effect, GoalTag::Local, "add sparkling particles around the {object}"},
    {GoalType::Effect, GoalTag::Global, "apply a vignette at moderate intensity ({pct}%)"},
    {GoalType::Effect, GoalTag::Local, "add motion blur to the running {animal}"},
    {GoalType::Color, GoalTag::Global, "set color temperature to {kelvin} K"},
    {GoalType::Color, GoalTag::Global, "shift the palette toward {color} and {color2} tones"},
    {GoalType::Color, GoalTag::Global, "increase saturation by {pct}%"},
    {GoalType::Color, GoalTag::Local, "paint the front door {color}"},
    {GoalType::Color, GoalTag::Global, "grade the shadows with a {color} tint"},
    {GoalType::Lighting, GoalTag::Local, "raise the key light on the subject's left cheek"},
    {GoalType::Lighting, GoalTag::Local, "add a warm rim light behind the {object}"},
    {GoalType::Lighting, GoalTag::Global, "set the scene to {time} lighting"},
    {GoalType::Lighting, GoalTag::Global, "cast long shadows from the {direction}"},
    {GoalType::Lighting, GoalTag::Global, "increase overall brightness by {pct}%"},
    {GoalType::Composition, GoalTag::Layout, "frame the main subject on the left third"},
    {GoalType::Composition, GoalTag::Layout, "use a low camera angle"},
    {GoalType::Composition, GoalTag::Layout, "leave negative space at the top for copy"},
    {GoalType::Composition, GoalTag::Layout, "keep the horizon line at {pct}% height"},
    {GoalType::Composition, GoalTag::Layout, "arrange the stepping stones in a diagonal line"},
};

// Approximate goal-type mix of long design briefs (objects dominate).
constexpr std::array<double, 6> kTypeWeights = {0.32, 0.17, 0.17, 0.12, 0.11, 0.11};

constexpr const char* kColors[] = {"red", "teal", "amber", "violet", "emerald", "crimson", "ivory", "cobalt"};
constexpr const char* kObjects[] = {"kite", "lantern", "bicycle", "teapot", "sailboat", "clock", "violin", "mailbox"};
constexpr const char* kRegions[] = {"upper left", "lower right", "background", "foreground", "left edge", "valley"};
constexpr const char* kSurfaces[] = {"wooden table", "stone wall", "window sill", "rooftop", "pier"};
constexpr const char* kAnimals[] = {"heron", "fox", "sparrow", "deer", "owl", "cat"};
constexpr const char* kMaterials[] = {"bronze", "marble", "glass", "oak", "copper"};
constexpr const char* kWords[] = {"TIMELESS BEAUTY", "GRAND OPENING", "NORTHERN LIGHTS", "SUMMER SALE",
                                  "HELLO WORLD", "OCEAN DRIVE", "MIDNIGHT MARKET"};
constexpr const char* kFonts[] = {"elegant serif", "bold sans-serif", "handwritten script", "monospace"};
constexpr const char* kTimes[] = {"golden hour", "blue hour", "overcast noon", "moonlit night"};
constexpr const char* kDirections[] = {"west", "east", "upper right", "low left"};
constexpr const char* kCategories[] = {"fantasy_creatures", "urban_architecture", "nature_landscapes",
                                       "historical_scene", "product_showcase", "portrait_studio"};

class Draws {
 public:
  explicit Draws(std::uint64_t seed) : engine_(seed) {}
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform_index(engine_(), n)); }
  double unit() { return unit_interval(engine_()); }
  template <std::size_t N>
  const char* pick(const char* const (&options)[N]) {
    return options[index(N)];
  }

 private:
  std::mt19937_64 engine_;
};

std::string fill(std::string_view pattern, Draws& draws) {
  std::string out;
  std::string color1;
  for (std::size_t i = 0; i < pattern.size();) {
    if (pattern[i] != '{') {
      out += pattern[i++];
      continue;
    }
    const auto close = pattern.find('}', i);
    const auto slot = pattern.substr(i + 1, close - i - 1);
    i = close + 1;
    if (slot == "color") {
      color1 = draws.pick(kColors);
      out += color1;
    } else if (slot == "color2") {
      std::string c;
      do c = draws.pick(kColors);
      while (c == color1);
      out += c;
    } else if (slot == "object") {
      out += draws.pick(kObjects);
    } else if (slot == "region") {
      out += draws.pick(kRegions);
    } else if (slot == "surface") {
      out += draws.pick(kSurfaces);
    } else if (slot == "animal") {
      out += draws.pick(kAnimals);
    } else if (slot == "material") {
      out += draws.pick(kMaterials);
    } else if (slot == "WORD") {
      out += draws.pick(kWords);
    } else if (slot == "font") {
      out += draws.pick(kFonts);
    } else if (slot == "time") {
      out += draws.pick(kTimes);
    } else if (slot == "direction") {
      out += draws.pick(kDirections);
    } else if (slot == "count") {
      out += std::to_string(3 + draws.index(6));
    } else if (slot == "size") {
      out += std::to_string(24 + 12 * draws.index(5));
    } else if (slot == "pct") {
      out += std::to_string(10 + 5 * draws.index(15));
    } else if (slot == "kelvin") {
      out += std::to_string(2700 + 100 * draws.index(40));
    } else {
      fail(ErrorCode::InvalidArgument, "unknown template slot {" + std::string(slot) + "}");
    }
  }
  return out;
}

GoalType draw_type(Draws& draws, const std::array<bool, 6>& available) {
  double total = 0.0;
  for (std::size_t i = 0; i < 6; ++i)
    if (available[i]) total += kTypeWeights[i];
  double u = draws.unit() * total;
  for (std::size_t i = 0; i < 6; ++i) {
    if (!available[i]) continue;
    if (u < kTypeWeights[i]) return kGoalTypes[i];
    u -= kTypeWeights[i];
  }
  for (std::size_t i = 6; i-- > 0;)
    if (available[i]) return kGoalTypes[i];
  fail(ErrorCode::InvalidArgument, "clause templates exhausted");
}

Task generate_task(const SuiteRecipe& recipe, std::size_t index) {
  Draws draws(mix(fnv1a("suite"), {recipe.seed, index}));
  constexpr std::size_t kTemplateCount = std::size(kTemplates);
  if (recipe.max_goals > kTemplateCount)
    fail(ErrorCode::InvalidArgument, "at most " + std::to_string(kTemplateCount) + " goals per task");

  Task task;
  char id[64];
  std::snprintf(id, sizeof id, "%s%04zu", recipe.id_prefix.c_str(), index);
  task.id = id;
  const bool i2i = recipe.mix == SuiteRecipe::Mix::I2I || (recipe.mix == SuiteRecipe::Mix::Mixed && index % 2 == 1);
  task.modality = i2i ? Modality::I2I : Modality::T2I;
  task.category = draws.pick(kCategories);
  task.subcategory = task.category + "_" + std::to_string(draws.index(4));
  if (i2i) task.source_image = "images/" + task.id + ".src";

  const auto goals = recipe.min_goals + draws.index(recipe.max_goals - recipe.min_goals + 1);
  std::set<std::size_t> used;
  for (std::size_t k = 0; k < goals; ++k) {
    std::array<bool, 6> available{};
    for (std::size_t t = 0; t < kTemplateCount; ++t)
      if (!used.count(t)) available[static_cast<std::size_t>(kTemplates[t].type)] = true;
    const auto type = draw_type(draws, available);
    std::vector<std::size_t> candidates;
    for (std::size_t t = 0; t < kTemplateCount; ++t)
      if (!used.count(t) && kTemplates[t].type == type) candidates.push_back(t);
    const auto chosen = candidates[draws.index(candidates.size())];
    used.insert(chosen);

    Goal goal;
    goal.id = "g" + std::to_string(k + 1);
    goal.text = fill(kTemplates[chosen].pattern, draws);
    goal.goal_type = kTemplates[chosen].type;
    goal.tag = kTemplates[chosen].tag;
    goal.strength = static_cast<double>(20 + 5 * draws.index(17));
    if (!task.instruction.empty()) task.instruction += "; ";
    task.instruction += goal.text;
    task.goals.push_back(std::move(goal));
  }
  return task;
}

}  // namespace

std::vector<Task> generate_suite(const SuiteRecipe& recipe) {
  if (recipe.min_goals == 0 || recipe.min_goals > recipe.max_goals)
    fail(ErrorCode::InvalidArgument, "goal range must satisfy 1 <= min <= max");
  std::vector<Task> tasks;
  tasks.reserve(recipe.count);
  for (std::size_t i = 0; i < recipe.count; ++i) tasks.push_back(generate_task(recipe, i));
  return tasks;
}

void write_generated_suite(const std::filesystem::path& dir, const std::vector<Task>& tasks) {
  save_suite(dir, tasks);
  for (const auto& t : tasks)
    if (t.source_image) write_file(dir / *t.source_image, "simulated source image for " + t.id + "\n");
}

}  // namespace gdir
