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

#include "core/sim_world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace gdir {
namespace {

enum Salt : std::uint64_t { kSuccess = 1, kQuality = 2, kSideEffect = 3, kVictim = 4, kPreset = 5 };

}  // namespace

std::size_t Canvas::index_of(const std::string& goal_id) const {
  auto it = std::find(goal_ids.begin(), goal_ids.end(), goal_id);
  if (it == goal_ids.end()) fail(ErrorCode::InvalidArgument, "unknown goal id '" + goal_id + "'");
  return static_cast<std::size_t>(it - goal_ids.begin());
}

bool Canvas::satisfied(const std::string& goal_id) const {
  return attributes[index_of(goal_id)].satisfied;
}

std::size_t Canvas::satisfied_count() const {
  return static_cast<std::size_t>(
      std::count_if(attributes.begin(), attributes.end(), [](const Attribute& a) { return a.satisfied; }));
}

std::string Canvas::ref(const std::string& task_id) const {
  char buf[48];
  std::snprintf(buf, sizeof buf, "/r%llu-%016llx", static_cast<unsigned long long>(revision),
                static_cast<unsigned long long>(lineage));
  return "sim://" + task_id + buf;
}

void SimConfig::validate() const {
  auto check = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0))
      fail(ErrorCode::Config, std::string("sim.") + name + " must lie in [0, 1]");
  };
  check(p_success, "p_success");
  check(p_side_effect, "p_side_effect");
  check(verifier_noise, "verifier_noise");
  check(i2i_presatisfied, "i2i_presatisfied");
}

SimWorld::SimWorld(const Task& task, const SimConfig& cfg)
    : task_id_(task.id), cfg_(cfg), stream_key_(mix(fnv1a("sim-world"), {cfg.seed, fnv1a(task.id)})) {
  cfg_.validate();
  initial_.goal_ids.reserve(task.goals.size());
  for (const auto& g : task.goals) initial_.goal_ids.push_back(g.id);
  initial_.attributes.assign(task.goals.size(), Attribute{});
  initial_.lineage = stream_key_;

  if (task.modality == Modality::I2I && cfg_.i2i_presatisfied > 0.0) {
    const auto n = task.goals.size();
    const auto k = static_cast<std::size_t>(std::lround(cfg_.i2i_presatisfied * static_cast<double>(n)));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return mix(stream_key_, {kPreset, a}) < mix(stream_key_, {kPreset, b});
    });
    for (std::size_t i = 0; i < std::min(k, n); ++i) {
      auto& attr = initial_.attributes[order[i]];
      attr.satisfied = true;
      attr.quality = 0.5 + 0.5 * unit_interval(mix(stream_key_, {kQuality, order[i]}));
    }
  }
  canvas_ = initial_;
}

SimWorld SimWorld::at(const Canvas& canvas) const {
  if (canvas.goal_ids != initial_.goal_ids)
    fail(ErrorCode::InvalidArgument, "canvas does not belong to task '" + task_id_ + "'");
  SimWorld copy = *this;
  copy.canvas_ = canvas;
  return copy;
}

const Canvas& SimWorld::apply_edit(const std::vector<std::string>& addressed, std::uint64_t candidate_seed) {
  std::vector<char> is_addressed(canvas_.goal_ids.size(), 0);
  for (const auto& id : addressed) is_addressed[canvas_.index_of(id)] = 1;

  const std::uint64_t key = mix(stream_key_, {canvas_.revision, candidate_seed});

  std::vector<std::size_t> victims;
  for (std::size_t i = 0; i < canvas_.attributes.size(); ++i)
    if (canvas_.attributes[i].satisfied && !is_addressed[i]) victims.push_back(i);

  for (std::size_t i = 0; i < canvas_.attributes.size(); ++i) {
    if (!is_addressed[i]) continue;
    const auto goal_key = fnv1a(canvas_.goal_ids[i]);
    if (unit_interval(mix(key, {kSuccess, goal_key})) < cfg_.p_success) {
      auto& attr = canvas_.attributes[i];
      attr.satisfied = true;
      attr.quality = 0.5 + 0.5 * unit_interval(mix(key, {kQuality, goal_key}));
    }
  }

  if (!victims.empty() && unit_interval(mix(key, kSideEffect)) < cfg_.p_side_effect) {
    const auto v = victims[uniform_index(mix(key, kVictim), victims.size())];
    canvas_.attributes[v] = Attribute{};
  }

  ++canvas_.revision;
  canvas_.lineage = mix(canvas_.lineage, {candidate_seed, canvas_.revision});
  return canvas_;
}

SimWorld world_new(const Task& task, const SimConfig& cfg) { return SimWorld(task, cfg); }

Canvas apply_edit(SimWorld& world, const std::vector<std::string>& addressed,
                  std::uint64_t candidate_seed) {
  return world.apply_edit(addressed, candidate_seed);
}

double ground_truth_coverage(const Canvas& canvas) {
  if (canvas.attributes.empty()) return 0.0;
  return static_cast<double>(canvas.satisfied_count()) / static_cast<double>(canvas.attributes.size());
}

double ground_truth_coverage(const SimWorld& world) { return ground_truth_coverage(world.canvas()); }

}  // namespace gdir
