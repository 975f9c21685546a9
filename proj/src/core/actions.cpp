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

#include "core/actions.hpp"

namespace gdir {
namespace {

constexpr std::array<std::string_view, kActionCount> kActionNames = {
    "batch_global", "batch_layout", "batch_local", "batch_text",   "batch_all",
    "template_0",   "template_1",   "template_2",  "continue",     "stop",
    "judge_pick",   "verdict_pass", "verdict_fail", "accept",      "rollback"};

constexpr std::array<std::string_view, 3> kKindNames = {"scope", "template", "self_query"};

}  // namespace

Origin origin_of(Action a) { return a <= Action::Stop ? Origin::Planner : Origin::Tool; }

std::string_view to_string(Action a) { return kActionNames[static_cast<std::size_t>(a)]; }

std::optional<Action> action_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kActionNames.size(); ++i)
    if (kActionNames[i] == s) return static_cast<Action>(i);
  return std::nullopt;
}

std::string_view to_string(DecisionKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

std::optional<DecisionKind> decision_kind_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (kKindNames[i] == s) return static_cast<DecisionKind>(i);
  return std::nullopt;
}

}  // namespace gdir
