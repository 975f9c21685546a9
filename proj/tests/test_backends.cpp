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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <set>

#include "core/backends.hpp"
#include "core/error.hpp"
#include "core/sim_backends.hpp"
#include "core/trajectory.hpp"
#include "helpers.hpp"

using namespace gdir;
using gdir::testing::goal;
using gdir::testing::make_task;
using gdir::testing::numbered_task;

namespace {

class FixedJudge final : public Judge {
 public:
  explicit FixedJudge(std::vector<double> s) : scores(std::move(s)) {}
  std::vector<double> score(std::span<const Candidate>, std::span<const Goal>) override { return scores; }
  std::vector<double> scores;
};

std::vector<Candidate> dummy_candidates(std::size_t n) {
  std::vector<Candidate> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i].seed = i;
  return c;
}

SimConfig quiet(double p_success = 0.7, double noise = 0.0) {
  SimConfig c;
  c.p_success = p_success;
  c.p_side_effect = 0.0;
  c.verifier_noise = noise;
  c.seed = 3;
  return c;
}

// Oracle for conflicts: same type and identical text once digits are removed,
// but different texts.
bool oracle_conflict(const Goal& a, const Goal& b) {
  auto strip = [](std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }), s.end());
    return s;
  };
  return a.goal_type == b.goal_type && a.text != b.text && strip(a.text) == strip(b.text);
}

}  // namespace

TEST_CASE("sim planner splits on the clause separator") {
  SimPlanner p;
  const auto plan = plan_goals(p, "add a red ball; overlay TITLE text");
  REQUIRE(plan.goals.size() == 2);
  CHECK(plan.goals[0].text == "add a red ball");
  CHECK(plan.goals[1].text == "overlay TITLE text");
  CHECK(plan.goals[1].goal_type == GoalType::Text);
  CHECK(plan.one_shot_feasibility == doctest::Approx(1.0 - 2.0 / 30.0));
  CHECK_THROWS_AS(plan_goals(p, ""), Error);
}

TEST_CASE("sim planner flags same-type clauses with different parameters") {
  SimPlanner p;
  const auto plan = plan_goals(p, "set color temperature to 3200 K; set color temperature to 6500 K; add a red ball");
  REQUIRE(plan.goals.size() == 3);
  CHECK(plan.goals[0].conflict);
  CHECK(plan.goals[1].conflict);
  CHECK_FALSE(plan.goals[2].conflict);
  CHECK(plan.has_conflict());

  const auto single = plan_goals(p, "set color temperature to 3200 K");
  CHECK(single.goals[0].text == "set color temperature to 3200 K");
  CHECK_FALSE(single.has_conflict());
}

TEST_CASE("conflict flags agree with a pairwise oracle") {
  const std::vector<std::string> shapes = {"set color temperature to # K", "increase saturation by #%",
                                           "scatter # lanterns across the foreground", "raise the key light by # stops",
                                           "keep the horizon line at #% height"};
  std::mt19937_64 rng(11);
  SimPlanner p;
  for (int trial = 0; trial < 300; ++trial) {
    std::string instruction;
    const int n = 2 + static_cast<int>(rng() % 4);
    for (int i = 0; i < n; ++i) {
      auto s = shapes[rng() % shapes.size()];
      s.replace(s.find('#'), 1, std::to_string(1 + rng() % 3));
      instruction += (i ? "; " : "") + s;
    }
    const auto plan = plan_goals(p, instruction);
    for (std::size_t i = 0; i < plan.goals.size(); ++i) {
      bool expected = false;
      for (std::size_t j = 0; j < plan.goals.size(); ++j)
        if (i != j && oracle_conflict(plan.goals[i], plan.goals[j])) expected = true;
      CHECK(plan.goals[i].conflict == expected);
    }
  }
}

TEST_CASE("propose_directive picks the mode from tags and verdicts") {
  SimPlanner p;
  const auto t = make_task("m", {goal("g1", "add a bench", GoalType::AddObject, GoalTag::Local),
                                 goal("g2", "warm the palette", GoalType::Color, GoalTag::Global),
                                 goal("g3", "overlay SALE text", GoalType::Text, GoalTag::TextOverlay)});
  auto ledger = ledger_new(t);
  Trajectory history;
  SUBCASE("local goal") {
    const auto d = propose_directive(p, ledger, std::span(t.goals).subspan(0, 1), history);
    CHECK(d.mode == DirectiveMode::LocalEdit);
    CHECK(d.addressed_goal_ids == std::vector<std::string>{"g1"});
  }
  SUBCASE("global goal after a failed verification") {
    ledger = ledger_apply(ledger, std::vector<Verdict>{{"g2", false, 0.95, ""}});
    const auto d = propose_directive(p, ledger, std::span(t.goals).subspan(1, 1), history);
    CHECK(d.mode == DirectiveMode::Regenerate);
  }
  SUBCASE("batch of three") {
    try {
      propose_directive(p, ledger, t.goals, history);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()) == "batch size exceeds 2");
    }
  }
  SUBCASE("completed goals are not pending") {
    ledger = ledger_apply(ledger, std::vector<Verdict>{{"g1", true, 0.95, ""}});
    CHECK_THROWS_AS(propose_directive(p, ledger, std::span(t.goals).subspan(0, 1), history), Error);
  }
}

TEST_CASE("reprompt rewrites a failed directive") {
  SimPlanner p;
  const auto t = make_task("r", {goal("g1", "add red ball")});
  const auto ledger = ledger_new(t);
  Trajectory history;
  const auto first = propose_directive(p, ledger, t.goals, history);
  CHECK_THROWS_AS(reprompt(p, t.goals, first, history), Error);  // no failure yet

  StepRecord failed;
  failed.iteration = 1;
  failed.directive = first;
  failed.pending_after = {"g1"};
  history.steps.push_back(failed);
  const auto again = reprompt(p, t.goals, first, history);
  CHECK(again.text != first.text);
  CHECK(again.addressed_goal_ids == first.addressed_goal_ids);

  Directive plain = first;
  plain.text = "add red ball";
  CHECK(reprompt(p, t.goals, plain, history).text != "add red ball");
}

TEST_CASE("generate_candidates arity and seeds") {
  const auto t = numbered_task("c", 4);
  SimEditor editor(t, quiet());
  SimPlanner p;
  const auto d = p.compose_directive(t.goals, false, 0);
  SUBCASE("four text-to-image samples") {
    const auto c = generate_candidates(editor, d, 4, std::nullopt, 42);
    REQUIRE(c.size() == 4);
    std::set<std::uint64_t> seeds;
    for (const auto& x : c) seeds.insert(x.seed);
    CHECK(seeds.size() == 4);
  }
  SUBCASE("single edit") { CHECK(generate_candidates(editor, d, 1, std::nullopt, 42).size() == 1); }
  SUBCASE("deterministic") {
    const auto a = generate_candidates(editor, d, 4, std::nullopt, 9);
    const auto b = generate_candidates(editor, d, 4, std::nullopt, 9);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(a[i].seed == b[i].seed);
      CHECK(*a[i].image.canvas == *b[i].image.canvas);
    }
  }
  SUBCASE("zero candidates") { CHECK_THROWS_AS(generate_candidates(editor, d, 0, std::nullopt, 1), Error); }
  SUBCASE("local edit without a base") {
    Directive local = d;
    local.mode = DirectiveMode::LocalEdit;
    local.addressed_goal_ids = {"g1"};
    CHECK_THROWS_AS(generate_candidates(editor, local, 1, std::nullopt, 1), Error);
  }
}

TEST_CASE("derived candidate seeds are pairwise distinct") {
  for (std::uint64_t key = 0; key < 500; ++key) {
    const auto s = derive_candidate_seeds(key, 8);
    CHECK(std::set<std::uint64_t>(s.begin(), s.end()).size() == 8);
  }
}

TEST_CASE("judge_select takes the first maximum") {
  const std::vector<Goal> none;
  auto c = dummy_candidates(3);
  FixedJudge j({3.0, 5.0, 4.0});
  CHECK(judge_select(j, c, none) == 1);
  for (const auto& x : c) CHECK(x.judge_score.has_value());

  auto two = dummy_candidates(2);
  FixedJudge tie({4.0, 4.0});
  CHECK(judge_select(tie, two, none) == 0);

  std::vector<Candidate> empty;
  CHECK_THROWS_AS(judge_select(tie, empty, none), Error);

  FixedJudge out_of_range({6.0});
  auto one = dummy_candidates(1);
  CHECK_THROWS_AS(judge_select(out_of_range, one, none), Error);
}

TEST_CASE("judge choice is invariant to positive scaling") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 2.5);
  const std::vector<Goal> none;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s(1 + rng() % 6);
    for (auto& x : s) x = std::round(u(rng) * 4) / 4;  // ties happen
    auto c1 = dummy_candidates(s.size());
    auto c2 = dummy_candidates(s.size());
    FixedJudge a(s);
    std::vector<double> scaled = s;
    for (auto& x : scaled) x *= 2.0;
    FixedJudge b(scaled);
    CHECK(judge_select(a, c1, none) == judge_select(b, c2, none));
  }
}

TEST_CASE("sim verifier") {
  const auto t = numbered_task("v", 5);
  SimWorld world(t, quiet(1.0));
  world.apply_edit({"g1", "g3"}, 1);
  const Image img{world.canvas().ref(t.id), std::make_shared<const Canvas>(world.canvas())};
  SUBCASE("noise-free verdicts equal ground truth") {
    SimVerifier v(t, quiet(1.0, 0.0));
    const auto out = verify(v, img, t.goals);
    REQUIRE(out.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(out[i].goal_id == t.goals[i].id);
      CHECK(out[i].satisfied == world.canvas().satisfied(t.goals[i].id));
      CHECK(out[i].confidence == 1.0);
    }
  }
  SUBCASE("full noise flips everything") {
    SimVerifier v(t, quiet(1.0, 1.0));
    const auto out = verify(v, img, t.goals);
    for (std::size_t i = 0; i < 5; ++i) CHECK(out[i].satisfied != world.canvas().satisfied(t.goals[i].id));
  }
  SUBCASE("no goals") {
    SimVerifier v(t, quiet());
    CHECK_THROWS_AS(verify(v, img, std::span<const Goal>{}), Error);
  }
}

TEST_CASE("sim judge rewards coverage") {
  const auto t = numbered_task("j", 4);
  SimWorld a(t, quiet(1.0)), b(t, quiet(1.0));
  a.apply_edit({"g1"}, 1);
  b.apply_edit({"g1", "g2", "g3"}, 1);
  std::vector<Candidate> c(2);
  c[0].image = {a.canvas().ref(t.id), std::make_shared<const Canvas>(a.canvas())};
  c[1].image = {b.canvas().ref(t.id), std::make_shared<const Canvas>(b.canvas())};
  SimJudge judge;
  CHECK(judge_select(judge, c, t.goals) == 1);
  CHECK(*c[1].judge_score <= 5.0);
  CHECK(*c[0].judge_score >= 0.0);
}

TEST_CASE("directive templates differ") {
  const auto t = numbered_task("d", 2);
  std::set<std::string> texts;
  for (int k = 0; k < 3; ++k) texts.insert(directive_text(k, DirectiveMode::LocalEdit, t.goals));
  CHECK(texts.size() == 3);
}
