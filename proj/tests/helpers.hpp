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

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "core/task.hpp"

namespace gdir::testing {

inline Goal goal(std::string id, std::string text, GoalType type = GoalType::AddObject,
                 GoalTag tag = GoalTag::Local) {
  Goal g;
  g.id = std::move(id);
  g.text = std::move(text);
  g.goal_type = type;
  g.tag = tag;
  return g;
}

// Task whose instruction is the goals' texts joined by "; ".
inline Task make_task(std::string id, std::vector<Goal> goals, Modality m = Modality::T2I) {
  Task t;
  t.id = std::move(id);
  t.modality = m;
  t.category = "test";
  t.subcategory = "unit";
  for (std::size_t i = 0; i < goals.size(); ++i) t.instruction += (i ? "; " : "") + goals[i].text;
  if (m == Modality::I2I) t.source_image = "images/" + t.id + ".src";
  t.goals = std::move(goals);
  return t;
}

// n goals g1..gn with distinct texts and the given tags cycled.
// Digit-free label so that generated goals never look like conflicting variants.
inline std::string letter_code(std::size_t i) {
  std::string s;
  do {
    s.insert(s.begin(), static_cast<char>('a' + i % 26));
    i /= 26;
  } while (i > 0);
  return s;
}

inline Task numbered_task(std::string id, std::size_t n, Modality m = Modality::T2I,
                          std::vector<GoalTag> tags = {GoalTag::Local}) {
  std::vector<Goal> goals;
  for (std::size_t i = 1; i <= n; ++i)
    goals.push_back(goal("g" + std::to_string(i), "item " + letter_code(i) + " placed",
                         GoalType::AddObject, tags[(i - 1) % tags.size()]));
  return make_task(std::move(id), std::move(goals), m);
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("gdir-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace gdir::testing
