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

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gdir {

enum class GoalType { AddObject, Text, Effect, Color, Lighting, Composition };
inline constexpr std::array<GoalType, 6> kGoalTypes = {
    GoalType::AddObject, GoalType::Text,     GoalType::Effect,
    GoalType::Color,     GoalType::Lighting, GoalType::Composition};

// Declaration order is the scheduling precedence (global work first).
enum class GoalTag { Global, Layout, Local, TextOverlay };
inline constexpr std::array<GoalTag, 4> kGoalTags = {GoalTag::Global, GoalTag::Layout,
                                                     GoalTag::Local, GoalTag::TextOverlay};

enum class Modality { T2I, I2I };

std::string_view to_string(GoalType t);
std::string_view to_string(GoalTag t);
std::string_view to_string(Modality m);
std::optional<GoalType> goal_type_from_string(std::string_view s);
std::optional<GoalTag> goal_tag_from_string(std::string_view s);
std::optional<Modality> modality_from_string(std::string_view s);

struct Goal {
  std::string id;
  std::string text;  // verbatim clause of the owning instruction
  GoalType goal_type = GoalType::AddObject;
  GoalTag tag = GoalTag::Local;
  double strength = 50.0;  // percent, [0, 100]
  bool conflict = false;

  bool operator==(const Goal&) const = default;
};

struct Task {
  std::string id;
  Modality modality = Modality::T2I;
  std::string category;
  std::string subcategory;
  std::string instruction;
  std::optional<std::string> source_image;  // relative to the task file
  std::vector<Goal> goals;

  const Goal* find_goal(std::string_view goal_id) const;
  bool operator==(const Task&) const = default;
};

// Goal-level judgement from a verifier.
struct Verdict {
  std::string goal_id;
  bool satisfied = false;
  double confidence = 0.0;  // [0, 1]
  std::string explanation;

  bool operator==(const Verdict&) const = default;
};

// Throws Error{Parse} for malformed input, missing fields, unknown enum values,
// an empty goal list, or a strength outside [0, 100]. Unknown fields are ignored.
Task parse_task(std::string_view json_text);
std::string serialize_task(const Task& task);

struct Violation {
  std::string kind;  // e.g. "non-verbatim goal", "duplicate id"
  std::string goal_id;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(std::string_view kind) const;
  std::string summary() const;
};

// Reports every violated invariant. When base_dir is given, I2I source images
// are also checked for readability relative to it.
ValidationReport validate_task(const Task& task,
                               const std::optional<std::filesystem::path>& base_dir = std::nullopt);

struct Suite {
  std::filesystem::path dir;
  std::vector<Task> tasks;
};

// A suite is a directory of <id>.json task files plus manifest.json listing ids.
Suite load_suite(const std::filesystem::path& dir);
void save_suite(const std::filesystem::path& dir, const std::vector<Task>& tasks);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace gdir
