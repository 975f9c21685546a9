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

#include <doctest.h>

#include <random>

#include "core/error.hpp"
#include "core/metrics.hpp"
#include "helpers.hpp"

using namespace gdir;
using gdir::testing::goal;

namespace {

Trajectory trajectory_with(const std::vector<Goal>& goals, const std::vector<Verdict>& final_verdicts,
                           int iterations = 1, int editor_calls = 1) {
  Trajectory t;
  t.task_id = "t";
  for (const auto& g : goals) t.goals.push_back({g.id, g.goal_type, g.tag});
  t.final_verdicts = final_verdicts;
  t.iterations = iterations;
  t.editor_calls = editor_calls;
  return t;
}

TaskScore score_of(int satisfied, int total, int iterations = 1) {
  std::vector<Goal> goals;
  std::vector<Verdict> verdicts;
  for (int i = 0; i < total; ++i) {
    goals.push_back(goal("g" + std::to_string(i), "x"));
    verdicts.push_back({"g" + std::to_string(i), i < satisfied, 0.9, ""});
  }
  return score_task(trajectory_with(goals, verdicts, iterations));
}

}  // namespace

TEST_CASE("filter_verdicts examples") {
  const std::vector<Verdict> v = {{"a", true, 0.80, ""}, {"b", true, 0.81, ""}, {"c", false, 0.99, ""}};
  const auto out = filter_verdicts(v);
  CHECK_FALSE(out[0].satisfied);
  CHECK(out[1].satisfied);
  CHECK_FALSE(out[2].satisfied);
  CHECK(count_satisfied(out) == 1);
}

TEST_CASE("score_task labels") {
  const auto a = score_of(15, 18);
  CHECK(a.finish_fraction == doctest::Approx(0.8333).epsilon(1e-4));
  CHECK(a.label == Label::Success);
  CHECK(score_of(0, 18).label == Label::Failure);
  const auto c = score_of(7, 10);
  CHECK(c.finish_fraction == doctest::Approx(0.70));
  CHECK(c.label == Label::Partial);
  CHECK(score_of(4, 5).label == Label::Success);  // exactly 80%
  CHECK(label_for(8, 10) == Label::Success);
  CHECK(label_for(79, 100) == Label::Partial);
}

TEST_CASE("score_task treats goals without a final verdict as unsatisfied") {
  const std::vector<Goal> goals = {goal("g1", "a"), goal("g2", "b")};
  const auto s = score_task(trajectory_with(goals, {{"g1", true, 0.95, ""}}));
  CHECK(s.effective_satisfied == 1);
  CHECK(s.total_goals == 2);
}

TEST_CASE("aggregate examples") {
  const std::vector<TaskScore> pooled = {score_of(8, 10, 4), score_of(12, 20, 2)};
  const auto r = aggregate(pooled);
  CHECK(r.finish == doctest::Approx(20.0 / 30.0));
  CHECK(r.finish_macro == doctest::Approx((0.8 + 0.6) / 2));
  CHECK(r.success_rate == doctest::Approx(0.5));
  CHECK(r.success == 1);
  CHECK(r.partial == 1);
  CHECK(r.mean_iterations == doctest::Approx(3.0));
  CHECK(r.median_iterations == doctest::Approx(3.0));
  CHECK_THROWS_AS(aggregate(std::vector<TaskScore>{}), Error);
}

TEST_CASE("metrics match a brute-force recount") {
  std::mt19937_64 rng(50);
  std::uniform_real_distribution<double> conf(0.5, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<TaskScore> scores;
    int pooled_sat = 0, pooled_total = 0, successes = 0;
    std::array<int, 6> type_sat{}, type_total{};
    const int tasks = 1 + static_cast<int>(rng() % 6);
    for (int k = 0; k < tasks; ++k) {
      std::vector<Goal> goals;
      std::vector<Verdict> verdicts;
      const int n = 1 + static_cast<int>(rng() % 23);
      int sat = 0;
      for (int i = 0; i < n; ++i) {
        const auto type = kGoalTypes[rng() % 6];
        goals.push_back(goal("g" + std::to_string(i), "x", type));
        const bool s = rng() % 2;
        const double c = conf(rng);
        verdicts.push_back({"g" + std::to_string(i), s, c, ""});
        const bool passes = s && c >= 0.81;
        sat += passes;
        type_sat[static_cast<std::size_t>(type)] += passes;
        type_total[static_cast<std::size_t>(type)] += 1;
      }
      const auto score = score_task(trajectory_with(goals, verdicts));
      CHECK(score.effective_satisfied == sat);
      const bool success = sat > 0 && static_cast<double>(sat) / n >= 0.8 - 1e-12;
      CHECK((score.label == Label::Success) == success);
      CHECK((score.label == Label::Failure) == (sat == 0));
      int type_sum = 0, type_total_sum = 0;
      for (const auto& tc : score.per_type) {
        type_sum += tc.satisfied;
        type_total_sum += tc.total;
      }
      CHECK(type_sum == score.effective_satisfied);
      CHECK(type_total_sum == score.total_goals);
      pooled_sat += sat;
      pooled_total += n;
      successes += success;
      scores.push_back(score);
    }
    const auto r = aggregate(scores);
    CHECK(r.finish == doctest::Approx(static_cast<double>(pooled_sat) / pooled_total));
    CHECK(r.success_rate == doctest::Approx(static_cast<double>(successes) / tasks));
    for (std::size_t t = 0; t < 6; ++t) {
      if (type_total[t] == 0) {
        CHECK_FALSE(r.per_type_rate[t].has_value());
      } else {
        REQUIRE(r.per_type_rate[t].has_value());
        CHECK(*r.per_type_rate[t] == doctest::Approx(static_cast<double>(type_sat[t]) / type_total[t]));
      }
    }
  }
}

TEST_CASE("raising the threshold never increases the satisfied count") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Verdict> v(20);
    for (auto& x : v) x = {"g", rng() % 2 == 0, u(rng), ""};
    int prev = static_cast<int>(v.size()) + 1;
    for (double thr = 0.0; thr <= 1.0; thr += 0.05) {
      const int c = count_satisfied(filter_verdicts(v, thr));
      CHECK(c <= prev);
      prev = c;
    }
  }
}

TEST_CASE("report JSON round-trips and renders") {
  const std::vector<TaskScore> s = {score_of(8, 10, 4), score_of(12, 20, 2), score_of(0, 5, 6)};
  const auto r = aggregate(s);
  const auto back = report_from_json(report_to_json(r));
  CHECK(back.finish == r.finish);
  CHECK(back.finish_macro == r.finish_macro);
  CHECK(back.success_rate == r.success_rate);
  CHECK(back.per_type == r.per_type);
  CHECK(back.per_type_rate == r.per_type_rate);
  CHECK(back.median_iterations == r.median_iterations);
  CHECK(report_to_json(back) == report_to_json(r));
  const auto table = render_table(r);
  CHECK(table.find("Success>=80%") != std::string::npos);
  CHECK(table.find("Composition") != std::string::npos);
  CHECK_THROWS_AS(report_from_json("{}"), Error);
}
