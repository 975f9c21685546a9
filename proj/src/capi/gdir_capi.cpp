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

#include "gdir/gdir.h"

#include <cstring>
#include <string>

#include "core/config.hpp"
#include "core/error.hpp"
#include "core/sim_world.hpp"
#include "core/workflows.hpp"

struct gdir_config {
  std::optional<std::filesystem::path> path;
  gdir::Overrides overrides;
  gdir::AppConfig cfg;
};

namespace {

thread_local std::string g_last_error;

gdir_status to_status(gdir::ErrorCode c) {
  using gdir::ErrorCode;
  switch (c) {
    case ErrorCode::InvalidArgument:
      return GDIR_ERR_INVALID_ARGUMENT;
    case ErrorCode::Io:
      return GDIR_ERR_IO;
    case ErrorCode::Parse:
      return GDIR_ERR_PARSE;
    case ErrorCode::Validation:
      return GDIR_ERR_VALIDATION;
    case ErrorCode::Config:
      return GDIR_ERR_CONFIG;
    case ErrorCode::Backend:
      return GDIR_ERR_BACKEND;
    case ErrorCode::Auth:
      return GDIR_ERR_AUTH;
    case ErrorCode::Diverged:
      return GDIR_ERR_DIVERGED;
    case ErrorCode::NotFound:
      return GDIR_ERR_NOT_FOUND;
  }
  return GDIR_ERR_INTERNAL;
}

template <typename Fn>
gdir_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return GDIR_OK;
  } catch (const gdir::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    g_last_error = e.what();
    return GDIR_ERR_IO;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return GDIR_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return GDIR_ERR_INTERNAL;
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void need(const void* p, const char* what) {
  if (!p) gdir::fail(gdir::ErrorCode::InvalidArgument, std::string(what) + " must not be NULL");
}

}  // namespace

extern "C" {

const char* gdir_version(void) { return "0.1.0"; }

const char* gdir_last_error(void) { return g_last_error.c_str(); }

const char* gdir_status_name(gdir_status s) {
  switch (s) {
    case GDIR_OK:
      return "ok";
    case GDIR_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case GDIR_ERR_IO:
      return "io error";
    case GDIR_ERR_PARSE:
      return "parse error";
    case GDIR_ERR_VALIDATION:
      return "validation error";
    case GDIR_ERR_CONFIG:
      return "config error";
    case GDIR_ERR_BACKEND:
      return "backend error";
    case GDIR_ERR_AUTH:
      return "auth error";
    case GDIR_ERR_DIVERGED:
      return "diverged";
    case GDIR_ERR_NOT_FOUND:
      return "not found";
    default:
      return "internal error";
  }
}

void gdir_string_free(char* s) { std::free(s); }

gdir_status gdir_config_load(const char* path, gdir_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    auto h = std::make_unique<gdir_config>();
    if (path) h->path = path;
    h->cfg = gdir::load_config(h->path);
    *out = h.release();
  });
}

gdir_status gdir_config_set(gdir_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    need(cfg, "cfg");
    need(key, "key");
    need(value, "value");
    auto overrides = cfg->overrides;
    overrides[key] = value;
    cfg->cfg = gdir::load_config(cfg->path, overrides);
    cfg->overrides = std::move(overrides);
  });
}

gdir_status gdir_config_get_path(const gdir_config* cfg, const char* which, char** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(which, "which");
    need(out, "out");
    const std::string w = which;
    if (w == "tasks")
      *out = dup(cfg->cfg.paths.tasks.string());
    else if (w == "output")
      *out = dup(cfg->cfg.paths.output.string());
    else if (w == "prompts")
      *out = dup(cfg->cfg.paths.prompts.string());
    else
      gdir::fail(gdir::ErrorCode::InvalidArgument, "unknown path name '" + w + "'");
  });
}

gdir_status gdir_config_hash(const gdir_config* cfg, char** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = dup(cfg->cfg.hash());
  });
}

gdir_status gdir_config_canonical(const gdir_config* cfg, char** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    *out = dup(cfg->cfg.canonical());
  });
}

void gdir_config_free(gdir_config* cfg) { delete cfg; }

gdir_status gdir_run_suite(const gdir_config* cfg, const char* suite_dir, const char* out_dir, unsigned jobs,
                           const char* policy_path, gdir_run_result* out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(suite_dir, "suite_dir");
    need(out_dir, "out_dir");
    std::optional<std::filesystem::path> policy;
    if (policy_path) policy = policy_path;
    const auto s = gdir::run_suite(cfg->cfg, suite_dir, out_dir, jobs ? jobs : 1, policy);
    if (out) *out = {static_cast<int>(s.tasks.size()), s.failed};
  });
}

gdir_status gdir_eval(const gdir_config* cfg, const char* out_dir, char** report_json, char** table) {
  return guarded([&] {
    need(out_dir, "out_dir");
    const double threshold = cfg ? cfg->cfg.run.confidence_threshold : 0.81;
    const auto r = gdir::eval_dir(out_dir, threshold);
    if (report_json) *report_json = dup(gdir::report_to_json(r));
    if (table) *table = dup(gdir::render_table(r));
  });
}

gdir_status gdir_report_render(const char* report_path, char** table) {
  return guarded([&] {
    need(report_path, "report_path");
    need(table, "table");
    *table = dup(gdir::render_report_file(report_path));
  });
}

gdir_status gdir_train(const gdir_config* cfg, const char* suite_dir, const char* out_dir, unsigned jobs,
                       const char* resume_path, gdir_epoch_callback callback, void* user, gdir_train_result* out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(suite_dir, "suite_dir");
    need(out_dir, "out_dir");
    std::optional<std::filesystem::path> resume;
    if (resume_path) resume = resume_path;
    auto on_epoch = [&](const gdir::EpochStats& e) {
      if (callback) callback(e.epoch, e.mean_reward, e.mean_iterations, e.kl, user);
    };
    const auto s = gdir::train_suite(cfg->cfg, suite_dir, out_dir, jobs ? jobs : 1, resume, on_epoch);
    if (out)
      *out = {s.epochs_run, s.before.mean_iterations, s.after.mean_iterations, s.before.mean_reward,
              s.after.mean_reward};
  });
}

gdir_status gdir_generate_suite(const char* dir, unsigned count, unsigned min_goals, unsigned max_goals,
                                const char* mix, uint64_t seed) {
  return guarded([&] {
    need(dir, "dir");
    need(mix, "mix");
    gdir::SuiteRecipe recipe;
    recipe.count = count;
    recipe.min_goals = min_goals;
    recipe.max_goals = max_goals;
    recipe.seed = seed;
    const std::string m = mix;
    if (m == "t2i")
      recipe.mix = gdir::SuiteRecipe::Mix::T2I;
    else if (m == "i2i")
      recipe.mix = gdir::SuiteRecipe::Mix::I2I;
    else if (m == "mixed")
      recipe.mix = gdir::SuiteRecipe::Mix::Mixed;
    else
      gdir::fail(gdir::ErrorCode::InvalidArgument, "mix must be t2i, i2i or mixed");
    gdir::write_generated_suite(dir, gdir::generate_suite(recipe));
  });
}

}  // extern "C"
