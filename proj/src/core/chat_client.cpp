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

#include "core/chat_client.hpp"

#include <httplib.h>
#include <openssl/evp.h>

#include "core/error.hpp"
#include "core/task.hpp"

namespace gdir {

ChatClient::ChatClient(Endpoint endpoint) : endpoint_(std::move(endpoint)) {
  const auto& url = endpoint_.base_url;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) fail(ErrorCode::Config, "endpoint " + endpoint_.name + ": bad base URL '" + url + "'");
  const auto path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
}

nlohmann::json ChatClient::post_json(std::string_view path, const nlohmann::json& body) const {
  httplib::Client cli(origin_);
  const auto secs = static_cast<time_t>(endpoint_.timeout_s);
  const auto usecs = static_cast<time_t>((endpoint_.timeout_s - static_cast<double>(secs)) * 1e6);
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (!endpoint_.api_key.empty()) headers.emplace("Authorization", "Bearer " + endpoint_.api_key);
  const std::string target = prefix_ + std::string(path);
  auto res = cli.Post(target, headers, body.dump(), "application/json");
  const std::string where = "endpoint " + endpoint_.name + " (" + origin_ + target + ")";
  if (!res) fail(ErrorCode::Backend, where + ": transport error: " + httplib::to_string(res.error()));
  if (res->status == 401 || res->status == 403)
    fail(ErrorCode::Auth, where + ": authentication failed with status " + std::to_string(res->status));
  if (res->status < 200 || res->status >= 300)
    fail(ErrorCode::Backend, where + ": HTTP status " + std::to_string(res->status));
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Backend, where + ": response is not JSON: " + e.what());
  }
}

nlohmann::json chat_request_json(const ChatRequest& request) {
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : request.messages) {
    if (m.image_data_urls.empty()) {
      msgs.push_back({{"role", m.role}, {"content", m.text}});
      continue;
    }
    nlohmann::json parts = nlohmann::json::array();
    parts.push_back({{"type", "text"}, {"text", m.text}});
    for (const auto& url : m.image_data_urls) parts.push_back({{"type", "image_url"}, {"image_url", {{"url", url}}}});
    msgs.push_back({{"role", m.role}, {"content", parts}});
  }
  return {{"model", request.model}, {"messages", msgs}, {"temperature", request.temperature}};
}

std::string ChatClient::complete(const ChatRequest& request) const {
  const auto res = post_json("/chat/completions", chat_request_json(request));
  try {
    const auto& content = res.at("choices").at(0).at("message").at("content");
    if (!content.is_string() || content.get<std::string>().empty())
      fail(ErrorCode::Backend, "endpoint " + endpoint_.name + ": empty assistant message");
    return content.get<std::string>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorCode::Backend, "endpoint " + endpoint_.name + ": response has no choices[0].message.content");
  }
}

std::optional<nlohmann::json> extract_json(std::string_view text) {
  std::string_view body = text;
  if (auto open = text.find("```"); open != std::string_view::npos) {
    auto start = text.find('\n', open);
    auto close = start == std::string_view::npos ? start : text.find("```", start);
    if (close == std::string_view::npos) return std::nullopt;
    body = text.substr(start + 1, close - start - 1);
  }
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

nlohmann::json complete_structured(const ChatClient& client, ChatRequest request,
                                   const std::function<std::string(const nlohmann::json&)>& check, int retries) {
  std::string problem;
  for (int attempt = 0; attempt <= retries; ++attempt) {
    const auto reply = client.complete(request);
    const auto doc = extract_json(reply);
    if (!doc) {
      problem = "the reply did not contain a JSON document";
    } else {
      try {
        problem = check(*doc);
      } catch (const nlohmann::json::exception& e) {
        problem = e.what();
      } catch (const Error& e) {
        problem = e.what();
      }
      if (problem.empty()) return *doc;
    }
    request.messages.push_back({"assistant", reply, {}});
    request.messages.push_back(
        {"user", "Your previous answer could not be used (" + problem +
                     "). Reply again with only a ```json fenced block that follows the requested schema.",
         {}});
  }
  fail(ErrorCode::Parse, "endpoint " + client.endpoint().name + ": structured output invalid after " +
                             std::to_string(retries) + " retries: " + problem);
}

std::string base64_encode(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string base64_decode(std::string_view text) {
  std::string clean;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) clean.push_back(c);
  if (clean.size() % 4) fail(ErrorCode::Parse, "base64 length is not a multiple of 4");
  std::string out(3 * clean.size() / 4, '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(clean.data()), static_cast<int>(clean.size()));
  if (n < 0) fail(ErrorCode::Parse, "invalid base64 data");
  // EVP_DecodeBlock counts padding bytes as output; drop them.
  std::size_t pad = 0;
  if (!clean.empty() && clean.back() == '=') ++pad;
  if (clean.size() > 1 && clean[clean.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const auto open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) break;
    const auto close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) break;
    out.append(tmpl.substr(pos, open - pos));
    const std::string key(tmpl.substr(open + 2, close - open - 2));
    auto it = values.find(key);
    if (it == values.end()) fail(ErrorCode::Config, "prompt placeholder '{{" + key + "}}' has no value");
    out += it->second;
    pos = close + 2;
  }
  out.append(tmpl.substr(pos));
  return out;
}

std::string PromptLibrary::render(const std::string& name, const std::map<std::string, std::string>& values) const {
  const auto path = dir_ / (name + ".txt");
  if (!std::filesystem::exists(path)) fail(ErrorCode::Config, "missing prompt template " + path.string());
  return substitute(read_file(path), values);
}

}  // namespace gdir
