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

#include "core/task.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "core/error.hpp"

namespace gdir {
namespace {

using ojson = nlohmann::ordered_json;

constexpr std::array<std::string_view, 6> kGoalTypeNames = {
    "add_object", "text", "effect", "color", "lighting", "composition"};
constexpr std::array<std::string_view, 4> kGoalTagNames = {"global", "layout", "local",
                                                           "text_overlay"};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
  for (std::size_t i = 0; i < N; ++i)
    if (names[i] == s) return static_cast<Enum>(i);
  return std::nullopt;
}

const nlohmann::json& require(const nlohmann::json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end()) fail(ErrorCode::Parse, std::string("missing required field '") + field + "'");
  return *it;
}

std::string require_string(const nlohmann::json& obj, const char* field) {
  const auto& v = require(obj, field);
  if (!v.is_string())
    fail(ErrorCode::Parse, std::string("malformed document: field '") + field + "' must be a string");
  return v.get<std::string>();
}

template <typename Enum>
Enum require_enum(const nlohmann::json& obj, const char* field,
                  std::optional<Enum> (*convert)(std::string_view)) {
  auto raw = require_string(obj, field);
  auto value = convert(raw);
  if (!value)
    fail(ErrorCode::Parse, "unknown enum value '" + raw + "' for field '" + field + "'");
  return *value;
}

Goal parse_goal(const nlohmann::json& g) {
  if (!g.is_object()) fail(ErrorCode::Parse, "malformed document: goal must be an object");
  Goal goal;
  goal.id = require_string(g, "id");
  goal.text = require_string(g, "text");
  goal.goal_type = require_enum<GoalType>(g, "goal_type", goal_type_from_string);
  goal.tag = require_enum<GoalTag>(g, "tag", goal_tag_from_string);
  const auto& strength = require(g, "strength");
  if (!strength.is_number())
    fail(ErrorCode::Parse, "malformed document: field 'strength' must be a number");
  goal.strength = strength.get<double>();
  if (!(goal.strength >= 0.0 && goal.strength <= 100.0))
    fail(ErrorCode::Parse, "strength out of range for goal '" + goal.id + "'");
  const auto& conflict = require(g, "conflict");
  if (!conflict.is_boolean())
    fail(ErrorCode::Parse, "malformed document: field 'conflict' must be a boolean");
  goal.conflict = conflict.get<bool>();
  return goal;
}

}  // namespace

std::string_view to_string(GoalType t) { return kGoalTypeNames[static_cast<std::size_t>(t)]; }
std::string_view to_string(GoalTag t) { return kGoalTagNames[static_cast<std::size_t>(t)]; }
std::string_view to_string(Modality m) { return m == Modality::T2I ? "t2i" : "i2i"; }

std::optional<GoalType> goal_type_from_string(std::string_view s) {
  return lookup<GoalType>(kGoalTypeNames, s);
}
std::optional<GoalTag> goal_tag_from_string(std::string_view s) {
  return lookup<GoalTag>(kGoalTagNames, s);
}
std::optional<Modality> modality_from_string(std::string_view s) {
  if (s == "t2i") return Modality::T2I;
  if (s == "i2i") return Modality::I2I;
  return std::nullopt;
}

const Goal* Task::find_goal(std::string_view goal_id) const {
  for (const auto& g : goals)
    if (g.id == goal_id) return &g;
  return nullptr;
}

Task parse_task(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::Parse, std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::Parse, "malformed document: expected a JSON object");

  Task task;
  task.id = require_string(doc, "id");
  task.modality = require_enum<Modality>(doc, "modality", modality_from_string);
  task.category = require_string(doc, "category");
  task.subcategory = require_string(doc, "subcategory");
  task.instruction = require_string(doc, "instruction");
  if (auto it = doc.find("source_image"); it != doc.end() && !it->is_null()) {
    if (!it->is_string())
      fail(ErrorCode::Parse, "malformed document: field 'source_image' must be a string");
    task.source_image = it->get<std::string>();
  }
  const auto& goals = require(doc, "goals");
  if (!goals.is_array()) fail(ErrorCode::Parse, "malformed document: field 'goals' must be an array");
  if (goals.empty()) fail(ErrorCode::Parse, "empty goal list");
  task.goals.reserve(goals.size());
  for (const auto& g : goals) task.goals.push_back(parse_goal(g));
  return task;
}

std::string serialize_task(const Task& task) {
  ojson doc;
  doc["id"] = task.id;
  doc["modality"] = to_string(task.modality);
  doc["category"] = task.category;
  doc["subcategory"] = task.subcategory;
  doc["instruction"] = task.instruction;
  if (task.source_image) doc["source_image"] = *task.source_image;
  doc["goals"] = ojson::array();
  for (const auto& g : task.goals) {
    doc["goals"].push_back({{"id", g.id},
                            {"text", g.text},
                            {"goal_type", to_string(g.goal_type)},
                            {"tag", to_string(g.tag)},
                            {"strength", g.strength},
                            {"conflict", g.conflict}});
  }
  return doc.dump(2) + "\n";
}

bool ValidationReport::has(std::string_view kind) const {
  for (const auto& v : violations)
    if (v.kind == kind) return true;
  return false;
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) out << "; ";
    out << violations[i].kind;
    if (!violations[i].goal_id.empty()) out << " (" << violations[i].goal_id << ")";
    if (!violations[i].detail.empty()) out << ": " << violations[i].detail;
  }
  return out.str();
}

ValidationReport validate_task(const Task& task, const std::optional<std::filesystem::path>& base_dir) {
  ValidationReport report;
  auto add = [&](std::string kind, std::string goal_id = {}, std::string detail = {}) {
    report.violations.push_back({std::move(kind), std::move(goal_id), std::move(detail)});
  };

  if (task.id.empty()) add("empty task id");
  if (task.instruction.empty()) add("empty instruction");
  if (task.goals.empty()) add("empty goal list");

  std::set<std::string> seen;
  for (const auto& g : task.goals) {
    if (g.id.empty()) add("empty goal id");
    if (!seen.insert(g.id).second) add("duplicate id", g.id);
    if (g.text.empty()) {
      add("empty goal text", g.id);
    } else if (task.instruction.find(g.text) == std::string::npos) {
      add("non-verbatim goal", g.id, g.text);
    }
    if (!(g.strength >= 0.0 && g.strength <= 100.0)) add("strength out of range", g.id);
  }

  if (task.modality == Modality::I2I) {
    if (!task.source_image || task.source_image->empty()) {
      add("missing source image");
    } else if (base_dir) {
      std::ifstream probe(*base_dir / *task.source_image, std::ios::binary);
      if (!probe) add("unreadable source image", {}, *task.source_image);
    }
  }
  return report;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) fail(ErrorCode::Io, "short write to " + path.string());
}

Suite load_suite(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) fail(ErrorCode::NotFound, "task directory not found: " + dir.string());
  const auto manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path))
    fail(ErrorCode::NotFound, "suite manifest not found: " + manifest_path.string());

  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::Parse, "malformed manifest " + manifest_path.string() + ": " + e.what());
  }
  const nlohmann::json* ids = &manifest;
  if (manifest.is_object()) ids = &require(manifest, "tasks");
  if (!ids->is_array()) fail(ErrorCode::Parse, "malformed manifest: expected a list of task ids");

  Suite suite{dir, {}};
  for (const auto& id : *ids) {
    if (!id.is_string()) fail(ErrorCode::Parse, "malformed manifest: task ids must be strings");
    const auto path = dir / (id.get<std::string>() + ".json");
    Task task;
    try {
      task = parse_task(read_file(path));
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ": " + e.what());
    }
    suite.tasks.push_back(std::move(task));
  }
  return suite;
}

void save_suite(const std::filesystem::path& dir, const std::vector<Task>& tasks) {
  ojson manifest;
  manifest["tasks"] = ojson::array();
  for (const auto& t : tasks) {
    write_file(dir / (t.id + ".json"), serialize_task(t));
    manifest["tasks"].push_back(t.id);
  }
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace gdir
