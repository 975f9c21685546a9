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
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/ledger.hpp"
#include "core/sim_world.hpp"
#include "core/task.hpp"

namespace gdir {

struct Trajectory;

struct ExtractedPlan {
  std::vector<Goal> goals;
  double one_shot_feasibility = 0.0;  // [0, 1]

  bool has_conflict() const;
};

enum class DirectiveMode { FullCompose, LocalEdit, Regenerate };
std::string_view to_string(DirectiveMode m);
std::optional<DirectiveMode> directive_mode_from_string(std::string_view s);

struct Directive {
  std::string text;
  std::vector<std::string> addressed_goal_ids;
  DirectiveMode mode = DirectiveMode::LocalEdit;
  int template_id = 0;

  bool operator==(const Directive&) const = default;
};

// Opaque image handle: a file path or URL for hosted editors, a canvas
// snapshot for the simulated editor.
struct Image {
  std::string ref;
  std::shared_ptr<const Canvas> canvas;
};

struct Candidate {
  Image image;
  std::uint64_t seed = 0;
  std::optional<double> judge_score;  // [0, 5]
};

class Planner {
 public:
  virtual ~Planner() = default;
  virtual ExtractedPlan plan_goals(std::string_view instruction,
                                   const std::optional<std::string>& source_image) = 0;
  // Staged batch of one or two pending goals.
  virtual Directive propose_directive(const GoalLedger& ledger, std::span<const Goal> batch,
                                      const Trajectory& history, int template_id) = 0;
  // Complete composition addressing every listed goal.
  virtual Directive compose_directive(std::span<const Goal> goals, bool has_base, int template_id) = 0;
  virtual Directive reprompt(std::span<const Goal> failed_batch, const Directive& previous,
                             const Trajectory& history) = 0;
  // Answer to "can the image still improve?" in [0, 1].
  virtual double improvement_confidence(const GoalLedger& ledger, const Trajectory& history) = 0;
};

class Editor {
 public:
  virtual ~Editor() = default;
  // Candidate i must use seeds[i].
  virtual std::vector<Candidate> render(const Directive& directive, const std::optional<Image>& base,
                                        std::span<const std::uint64_t> seeds) = 0;
  // The I2I source photo, or nullopt for text-to-image tasks.
  virtual std::optional<Image> source_image() = 0;
};

class Verifier {
 public:
  virtual ~Verifier() = default;
  virtual std::vector<Verdict> evaluate(const Image& image, std::span<const Goal> goals) = 0;
};

class Judge {
 public:
  virtual ~Judge() = default;
  // One score in [0, 5] per candidate.
  virtual std::vector<double> score(std::span<const Candidate> candidates,
                                    std::span<const Goal> goals_in_scope) = 0;
};

struct Backends {
  std::unique_ptr<Planner> planner;
  std::unique_ptr<Editor> editor;
  std::unique_ptr<Verifier> verifier;
  std::unique_ptr<Judge> judge;
};

// Builds a fresh, task-scoped set of backends. Must be callable concurrently.
class BackendFactory {
 public:
  virtual ~BackendFactory() = default;
  virtual Backends make(const Task& task, const std::filesystem::path& task_dir) const = 0;
  virtual bool simulated() const = 0;
};

// Contract-enforcing entry points. They wrap the virtual hooks above and throw
// Error{InvalidArgument} on precondition failures or Error{Backend} when a
// backend breaks its postconditions.

ExtractedPlan plan_goals(Planner& planner, std::string_view instruction,
                         const std::optional<std::string>& source_image = std::nullopt);

Directive propose_directive(Planner& planner, const GoalLedger& ledger, std::span<const Goal> batch,
                            const Trajectory& history, int template_id = 0);

Directive reprompt(Planner& planner, std::span<const Goal> failed_batch, const Directive& previous,
                   const Trajectory& history);

std::vector<Candidate> generate_candidates(Editor& editor, const Directive& directive, int n,
                                           const std::optional<Image>& base, std::uint64_t seed_key);

std::size_t judge_select(Judge& judge, std::vector<Candidate>& candidates,
                         std::span<const Goal> goals_in_scope);

std::vector<Verdict> verify(Verifier& verifier, const Image& image, std::span<const Goal> goals);

// Mode routing for staged batches: no base image yet -> FullCompose; a
// Global/Layout goal that already failed verification -> Regenerate;
// otherwise LocalEdit.
DirectiveMode choose_mode(const GoalLedger& ledger, std::span<const Goal> batch, bool has_base);

// n pairwise-distinct seeds derived from seed_key.
std::vector<std::uint64_t> derive_candidate_seeds(std::uint64_t seed_key, int n);

// Same-type clauses whose wording matches once numeric parameters are masked
// but whose parameters differ (e.g. two colour temperatures).
void flag_conflicts(std::vector<Goal>& goals);

// Phrasings shared by planners that build directive text locally.
std::string directive_text(int template_id, DirectiveMode mode, std::span<const Goal> goals);

// True when history holds an attempt on exactly these goals that left at
// least one of them pending or was rolled back.
bool has_failed_attempt(const Trajectory& history, std::span<const Goal> batch);

}  // namespace gdir
