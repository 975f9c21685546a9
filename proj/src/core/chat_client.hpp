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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace gdir {

struct Endpoint {
  std::string name;      // used in error messages
  std::string base_url;  // scheme://host[:port][/prefix]
  std::string api_key;
  double timeout_s = 120.0;
};

struct ChatMessage {
  std::string role;
  std::string text;
  std::vector<std::string> image_data_urls;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
};

class ChatClient {
 public:
  explicit ChatClient(Endpoint endpoint);

  // POSTs a JSON body to base_url + path and returns the parsed response.
  nlohmann::json post_json(std::string_view path, const nlohmann::json& body) const;

  // Assistant text of the first choice.
  std::string complete(const ChatRequest& request) const;

  const Endpoint& endpoint() const { return endpoint_; }

 private:
  Endpoint endpoint_;
  std::string origin_;  // scheme://host:port
  std::string prefix_;  // path prefix, no trailing slash
};

nlohmann::json chat_request_json(const ChatRequest& request);

// Pulls the first ```json fenced block (or a bare JSON document) out of text.
std::optional<nlohmann::json> extract_json(std::string_view text);

// Asks for structured output. On a parse or schema failure the model sees its
// reply and the problem and tries again, at most `retries` more times.
// `check` returns an empty string when the document is acceptable.
nlohmann::json complete_structured(const ChatClient& client, ChatRequest request,
                                   const std::function<std::string(const nlohmann::json&)>& check,
                                   int retries = 2);

std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);

class PromptLibrary {
 public:
  explicit PromptLibrary(std::filesystem::path dir) : dir_(std::move(dir)) {}
  // Loads <dir>/<name>.txt and replaces every {{key}}.
  std::string render(const std::string& name, const std::map<std::string, std::string>& values) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& values);

}  // namespace gdir
