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

#include "core/policy.hpp"

#include <json.hpp>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "core/task.hpp"

namespace gdir {
namespace {

Eigen::Index row(Action a) { return static_cast<Eigen::Index>(a); }

}  // namespace

PolicyParams PolicyParams::reference() {
  PolicyParams p;
  auto& w = p.weights;
  w(row(Action::BatchGlobal), 0) = 1.5;
  w(row(Action::BatchLayout), 0) = 1.0;
  w(row(Action::BatchLocal), 0) = 0.5;
  w(row(Action::BatchText), 0) = 0.0;
  w(row(Action::BatchAll), 0) = -1.0;
  w(row(Action::BatchAll), 8) = 4.0;  // one-shot gate open
  w(row(Action::Template0), 0) = 1.0;
  w(row(Action::Continue), 0) = 3.5;
  return p;
}

Eigen::VectorXd feature_vector(const Features& f) {
  return Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
}

Eigen::VectorXd legal_probs(const PolicyParams& params, const Features& f, std::span<const Action> legal) {
  if (legal.empty()) fail(ErrorCode::InvalidArgument, "decision without legal actions");
  const Eigen::VectorXd phi = feature_vector(f);
  Eigen::VectorXd z(static_cast<Eigen::Index>(legal.size()));
  for (std::size_t i = 0; i < legal.size(); ++i)
    z(static_cast<Eigen::Index>(i)) = params.weights.row(row(legal[i])).dot(phi) / params.temperature;
  z.array() -= z.maxCoeff();
  Eigen::VectorXd p = z.array().exp();
  return p / p.sum();
}

Action GreedyPolicy::decide(const Decision& context) {
  const auto p = legal_probs(params_, context.features, context.legal);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < p.size(); ++i)
    if (p(i) > p(best)) best = i;
  return context.legal[static_cast<std::size_t>(best)];
}

Action SampledPolicy::decide(const Decision& context) {
  const auto p = legal_probs(params_, context.features, context.legal);
  const double u = unit_interval(mix(key_, draws_++));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    acc += p(i);
    if (u < acc) return context.legal[static_cast<std::size_t>(i)];
  }
  return context.legal.back();
}

std::string params_to_json(const PolicyParams& params, int epochs_done) {
  nlohmann::ordered_json j;
  j["format"] = "gdir-policy-v1";
  j["temperature"] = params.temperature;
  j["epochs"] = epochs_done;
  j["features"] = kFeatureCount;
  auto& rows = j["weights"] = nlohmann::ordered_json::object();
  for (std::size_t a = 0; a < kActionCount; ++a) {
    std::vector<double> r(kFeatureCount);
    for (std::size_t k = 0; k < kFeatureCount; ++k)
      r[k] = params.weights(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(k));
    rows[std::string(to_string(static_cast<Action>(a)))] = r;
  }
  return j.dump(2) + "\n";
}

PolicyParams params_from_json(std::string_view text, int* epochs_done) {
  PolicyParams p;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != "gdir-policy-v1") fail(ErrorCode::Parse, "not a policy file");
    p.temperature = j.at("temperature").get<double>();
    if (epochs_done) *epochs_done = j.value("epochs", 0);
    for (const auto& [name, values] : j.at("weights").items()) {
      const auto a = action_from_string(name);
      if (!a) fail(ErrorCode::Parse, "unknown action '" + name + "' in policy file");
      const auto r = values.get<std::vector<double>>();
      if (r.size() != kFeatureCount) fail(ErrorCode::Parse, "policy row '" + name + "' has the wrong width");
      for (std::size_t k = 0; k < kFeatureCount; ++k) p.weights(row(*a), static_cast<Eigen::Index>(k)) = r[k];
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("malformed policy file: ") + e.what());
  }
  if (!p.finite()) fail(ErrorCode::Parse, "policy file holds non-finite parameters");
  return p;
}

void save_params(const std::filesystem::path& path, const PolicyParams& params, int epochs_done) {
  write_file(path, params_to_json(params, epochs_done));
}

PolicyParams load_params(const std::filesystem::path& path, int* epochs_done) {
  return params_from_json(read_file(path), epochs_done);
}

}  // namespace gdir
