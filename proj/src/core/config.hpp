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
#include <map>
#include <optional>
#include <string>

#include "core/director.hpp"
#include "core/grpo.hpp"
#include "core/http_backends.hpp"
#include "core/sim_world.hpp"

namespace gdir {

enum class BackendKind { Sim, Http };

struct BackendSelection {
  BackendKind planner = BackendKind::Sim;
  BackendKind editor = BackendKind::Sim;
  BackendKind verifier = BackendKind::Sim;
  BackendKind judge = BackendKind::Sim;

  bool all_sim() const;
  bool any_http() const;
};

struct Paths {
  std::filesystem::path tasks = "tasks";
  std::filesystem::path output = "out";
  std::filesystem::path prompts = "prompts";
};

struct AppConfig {
  BackendSelection backends;
  HttpSettings http;
  SimConfig sim;
  RunConfig run;
  TrainConfig train;
  Paths paths;

  // Checks value ranges and that http roles have an endpoint and a key.
  void validate() const;
  // Sorted key = value lines over every setting except secrets.
  std::string canonical() const;
  // Hex SHA-256 of canonical().
  std::string hash() const;
};

using Overrides = std::map<std::string, std::string>;

// Flat "key = value" text with '#' comments. Overrides win over the text.
// Relative paths.* entries resolve against base_dir.
AppConfig parse_config(std::string_view text, const Overrides& overrides = {},
                       const std::filesystem::path& base_dir = {});

// Loads a file, or the built-in defaults when no path is given. VD_API_KEY
// supplies the http key.
AppConfig load_config(const std::optional<std::filesystem::path>& path, const Overrides& overrides = {});

std::string sha256_hex(std::string_view data);

}  // namespace gdir
