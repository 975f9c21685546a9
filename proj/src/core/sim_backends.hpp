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

#include "core/backends.hpp"
#include "core/sim_world.hpp"

namespace gdir {

// Clause-splitting planner: goals are the "; "-separated clauses of the
// instruction, feasibility falls linearly with goal count.
class SimPlanner final : public Planner {
 public:
  ExtractedPlan plan_goals(std::string_view instruction, const std::optional<std::string>& source_image) override;
  Directive propose_directive(const GoalLedger& ledger, std::span<const Goal> batch, const Trajectory& history,
                              int template_id) override;
  Directive compose_directive(std::span<const Goal> goals, bool has_base, int template_id) override;
  Directive reprompt(std::span<const Goal> failed_batch, const Directive& previous,
                     const Trajectory& history) override;
  // pending / (pending + 1): never below 0.5 while work remains.
  double improvement_confidence(const GoalLedger& ledger, const Trajectory& history) override;
};

GoalType classify_clause(std::string_view clause);

class SimEditor final : public Editor {
 public:
  SimEditor(const Task& task, const SimConfig& cfg, std::size_t max_in_flight = 4);

  std::vector<Candidate> render(const Directive& directive, const std::optional<Image>& base,
                                std::span<const std::uint64_t> seeds) override;
  std::optional<Image> source_image() override;

  const SimWorld& world() const { return world_; }

 private:
  SimWorld world_;
  bool i2i_;
  std::size_t max_in_flight_;
};

// Reads canvas ground truth and flips each verdict with probability
// verifier_noise. Flipped verdicts tend to carry lower confidence.
class SimVerifier final : public Verifier {
 public:
  SimVerifier(const Task& task, const SimConfig& cfg);
  std::vector<Verdict> evaluate(const Image& image, std::span<const Goal> goals) override;

 private:
  std::uint64_t key_;
  double noise_;
};

// Scores a candidate by the share of in-scope goals it satisfies, weighted by
// attribute quality, on the 0-5 scale.
class SimJudge final : public Judge {
 public:
  std::vector<double> score(std::span<const Candidate> candidates, std::span<const Goal> goals_in_scope) override;
};

Backends make_sim_backends(const Task& task, const SimConfig& cfg, std::size_t max_in_flight = 4);

class SimBackendFactory final : public BackendFactory {
 public:
  explicit SimBackendFactory(SimConfig cfg, std::size_t max_in_flight = 4)
      : cfg_(cfg), max_in_flight_(max_in_flight) {}
  Backends make(const Task& task, const std::filesystem::path& task_dir) const override;
  bool simulated() const override { return true; }
  const SimConfig& config() const { return cfg_; }

 private:
  SimConfig cfg_;
  std::size_t max_in_flight_;
};

}  // namespace gdir
