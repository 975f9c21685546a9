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

#include <cstdint>
#include <string>
#include <vector>

#include "core/task.hpp"

namespace gdir {

struct Attribute {
  bool satisfied = false;
  double quality = 0.0;  // [0, 1]; 0 while unsatisfied

  bool operator==(const Attribute&) const = default;
};

// Stand-in for an image: per-goal satisfaction in task goal order.
struct Canvas {
  std::vector<std::string> goal_ids;
  std::vector<Attribute> attributes;
  std::uint64_t revision = 0;
  std::uint64_t lineage = 0;  // hash of the edit history, identifies the snapshot

  std::size_t index_of(const std::string& goal_id) const;  // throws on unknown id
  bool satisfied(const std::string& goal_id) const;
  std::size_t satisfied_count() const;
  std::string ref(const std::string& task_id) const;

  bool operator==(const Canvas&) const = default;
};

struct SimConfig {
  double p_success = 0.7;
  double p_side_effect = 0.1;
  double verifier_noise = 0.05;
  double i2i_presatisfied = 0.0;  // fraction of goals already true in an I2I source
  std::uint64_t seed = 0;

  void validate() const;  // throws Error{Config}
};

class SimWorld {
 public:
  SimWorld(const Task& task, const SimConfig& cfg);

  const std::string& task_id() const { return task_id_; }
  const SimConfig& config() const { return cfg_; }
  std::uint64_t stream_key() const { return stream_key_; }
  const Canvas& canvas() const { return canvas_; }
  const Canvas& initial_canvas() const { return initial_; }

  // Copy of this world positioned at another snapshot of the same task.
  SimWorld at(const Canvas& canvas) const;

  // Each addressed attribute becomes satisfied with probability p_success;
  // with probability p_side_effect one previously satisfied, non-addressed
  // attribute regresses. All draws are keyed by (stream, revision, seed).
  const Canvas& apply_edit(const std::vector<std::string>& addressed, std::uint64_t candidate_seed);

 private:
  std::string task_id_;
  SimConfig cfg_;
  std::uint64_t stream_key_ = 0;
  Canvas initial_;
  Canvas canvas_;
};

SimWorld world_new(const Task& task, const SimConfig& cfg);
Canvas apply_edit(SimWorld& world, const std::vector<std::string>& addressed,
                  std::uint64_t candidate_seed);
double ground_truth_coverage(const Canvas& canvas);
double ground_truth_coverage(const SimWorld& world);

// Offline task generation for simulated suites.
struct SuiteRecipe {
  std::size_t count = 20;
  std::size_t min_goals = 15;
  std::size_t max_goals = 23;
  enum class Mix { T2I, I2I, Mixed } mix = Mix::T2I;
  std::uint64_t seed = 0;
  std::string id_prefix = "task";
};

std::vector<Task> generate_suite(const SuiteRecipe& recipe);

// Writes task files, the manifest, and placeholder source images for I2I tasks.
void write_generated_suite(const std::filesystem::path& dir, const std::vector<Task>& tasks);

}  // namespace gdir
