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
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace gdir {

// Closed vocabulary of trajectory tokens. Planner-origin symbols are decisions
// the planner makes; tool-origin symbols record judge/verifier/rollback
// outcomes and never receive policy gradient.
enum class Action : std::uint8_t {
  BatchGlobal,
  BatchLayout,
  BatchLocal,
  BatchText,
  BatchAll,
  Template0,
  Template1,
  Template2,
  Continue,
  Stop,
  JudgePick,
  VerdictPass,
  VerdictFail,
  Accept,
  Rollback,
};
inline constexpr std::size_t kActionCount = 15;
inline constexpr std::size_t kTemplateCount = 3;

enum class Origin { Planner, Tool };
enum class DecisionKind { Scope, Template, SelfQuery };

Origin origin_of(Action a);
std::string_view to_string(Action a);
std::optional<Action> action_from_string(std::string_view s);
std::string_view to_string(DecisionKind k);
std::optional<DecisionKind> decision_kind_from_string(std::string_view s);

inline Action template_action(int template_id) {
  return static_cast<Action>(static_cast<int>(Action::Template0) + template_id);
}
inline int template_id_of(Action a) { return static_cast<int>(a) - static_cast<int>(Action::Template0); }

// State features seen by the planner policy:
// [bias, pending global, pending layout, pending local, pending text (each as
//  a fraction of all goals), iteration / budget, last step rolled back,
//  best coverage fraction, one-shot gate open]
inline constexpr std::size_t kFeatureCount = 9;
using Features = std::array<double, kFeatureCount>;

struct Decision {
  DecisionKind kind = DecisionKind::Scope;
  Action action = Action::BatchAll;
  Features features{};
  std::vector<Action> legal;

  bool operator==(const Decision&) const = default;
};

}  // namespace gdir
