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

#include <filesystem>
#include <string>

#include "core/backends.hpp"
#include "core/chat_client.hpp"

namespace gdir {

struct HttpSettings {
  std::string base_url;
  std::string api_key;  // from VD_API_KEY
  std::string planner_model;
  std::string editor_model;
  std::string verifier_model;
  std::string judge_model;
  double temperature = 0.0;
  double timeout_s = 120.0;
  std::filesystem::path prompts_dir = "prompts";
  std::filesystem::path image_dir = "out/images";
  std::size_t max_in_flight = 4;
};

class HttpPlanner final : public Planner {
 public:
  explicit HttpPlanner(const HttpSettings& s);
  ExtractedPlan plan_goals(std::string_view instruction, const std::optional<std::string>& source_image) override;
  Directive propose_directive(const GoalLedger& ledger, std::span<const Goal> batch, const Trajectory& history,
                              int template_id) override;
  Directive compose_directive(std::span<const Goal> goals, bool has_base, int template_id) override;
  Directive reprompt(std::span<const Goal> failed_batch, const Directive& previous,
                     const Trajectory& history) override;
  double improvement_confidence(const GoalLedger& ledger, const Trajectory& history) override;

 private:
  std::string directive(std::span<const Goal> goals, DirectiveMode mode, int template_id,
                        const std::string& previous);
  ChatClient client_;
  PromptLibrary prompts_;
  std::string model_;
  double temperature_;
};

// Image endpoint: POST /images/generations, base64 payloads. Results are
// written under image_dir/<task id>/ and referenced by path.
class HttpEditor final : public Editor {
 public:
  HttpEditor(const HttpSettings& s, const Task& task, const std::filesystem::path& task_dir);
  std::vector<Candidate> render(const Directive& directive, const std::optional<Image>& base,
                                std::span<const std::uint64_t> seeds) override;
  std::optional<Image> source_image() override;

 private:
  ChatClient client_;
  std::string model_;
  std::filesystem::path out_dir_;
  std::optional<std::filesystem::path> source_;
  std::size_t max_in_flight_;
};

class HttpVerifier final : public Verifier {
 public:
  explicit HttpVerifier(const HttpSettings& s);
  std::vector<Verdict> evaluate(const Image& image, std::span<const Goal> goals) override;

 private:
  ChatClient client_;
  PromptLibrary prompts_;
  std::string model_;
  double temperature_;
};

class HttpJudge final : public Judge {
 public:
  explicit HttpJudge(const HttpSettings& s);
  std::vector<double> score(std::span<const Candidate> candidates, std::span<const Goal> goals_in_scope) override;

 private:
  ChatClient client_;
  PromptLibrary prompts_;
  std::string model_;
  double temperature_;
};

std::string image_data_url(const Image& image);
std::string describe_goals(std::span<const Goal> goals);

}  // namespace gdir
