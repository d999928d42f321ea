#include <gtest/gtest.h>

#include <optional>
#include <random>
#include <sstream>

#include "random_formula.hpp"
#include "semsyn/errors.hpp"
#include "semsyn/explore.hpp"
#include "semsyn/measures.hpp"
#include "semsyn/parser.hpp"
#include "semsyn/psolve.hpp"

using namespace semsyn;

namespace {

Partition part(std::vector<std::string> env, std::vector<std::string> sys) {
  return Partition::from_names(env, sys);
}

}  // namespace

TEST(ExploreFrontier, TrueClosesAfterOneExpansion) {
  PartialArena a(tt(), part({"r"}, {"g"}));
  PerspectiveState ps(Player::Sys);
  ps.frontier.push_back(a.initial());
  BaselineHeuristic h;
  EXPECT_EQ(explore_frontier(a, ps, h, 10), StintResult::ClosureReached);
  EXPECT_EQ(a.expansions(), 1U);
  EXPECT_TRUE(closed(a, Player::Sys));
}

TEST(ExploreFrontier, BudgetOneStopsEarly) {
  PartialArena a(parse_ltl("G (r <-> X g)"), part({"r"}, {"g"}));
  PerspectiveState ps(Player::Sys);
  ps.frontier.push_back(a.initial());
  BaselineHeuristic h;
  EXPECT_EQ(explore_frontier(a, ps, h, 1), StintResult::BudgetExhausted);
  EXPECT_EQ(a.expansions(), 1U);
  EXPECT_FALSE(ps.frontier.empty());
}

TEST(ExploreFrontier, OpensOnlyTheTopChoice) {
  PartialArena a(parse_ltl("G (r <-> X g)"), part({"r"}, {"g"}));
  PerspectiveState ps(Player::Sys);
  ps.frontier.push_back(a.initial());
  BaselineHeuristic h;
  ASSERT_EQ(explore_frontier(a, ps, h, 1000), StintResult::ClosureReached);
  EXPECT_TRUE(closed(a, Player::Sys));
  for (NodeId s = 0; s < a.num_sys(); ++s)
    if (a.find_sys(s) == s && !a.active_sys_choices(s).empty()) EXPECT_EQ(a.active_sys_choices(s).size(), 1U);
}

TEST(ExploreFrontier, SkipsNodesDecidedForTheOpponent) {
  PartialArena a(parse_ltl("G (r -> X g) & G F r"), part({"r"}, {"g"}));
  a.expand(a.initial());
  std::vector<NodeId> lost;
  for (NodeId s : a.env_children(a.initial()))
    for (NodeId t : a.sys_targets(s))
      if (t != a.initial() && !a.decided_env(t)) {
        a.set_decided_env(t, Player::Env);
        lost.push_back(t);
      }
  ASSERT_FALSE(lost.empty());
  PerspectiveState ps(Player::Sys);
  ps.frontier.push_back(a.initial());
  BaselineHeuristic h;
  explore_frontier(a, ps, h, 1000);
  for (NodeId t : lost) EXPECT_FALSE(a.env(t).expanded);
}

TEST(Backtrack, EmptyWhenFullyOpenedAndCapped) {
  PartialArena a(tt(), part({"r"}, {"g"}));
  PerspectiveState ps(Player::Sys);
  ps.frontier.push_back(a.initial());
  BaselineHeuristic h;
  explore_frontier(a, ps, h, 10);
  EXPECT_TRUE(backtrack_select(a, ps, 8).empty());

  PartialArena b(parse_ltl("G (r <-> X g)"), part({"r"}, {"g"}));
  PerspectiveState pb(Player::Sys);
  pb.frontier.push_back(b.initial());
  explore_frontier(b, pb, h, 1000);
  std::size_t open = 0;
  for (const auto& [n, r] : pb.ranked) open += b.find_sys(n) == n && r.cursor < r.order.size();
  ASSERT_GE(open, 1U);
  EXPECT_EQ(backtrack_select(b, pb, 100).size(), open);
  for (const auto& [n, r] : pb.ranked)
    if (b.find_sys(n) == n) EXPECT_EQ(r.cursor, r.order.size());
  EXPECT_TRUE(backtrack_select(b, pb, 100).empty());
}

TEST(Backtrack, PrefersHigherTruenessForTheSystem) {
  PartialArena a(parse_ltl("G (r <-> X g) & (F r | G (g | X g))"), part({"r"}, {"g"}));
  PerspectiveState ps(Player::Sys);
  ps.frontier.push_back(a.initial());
  BaselineHeuristic h;
  explore_frontier(a, ps, h, 1000);
  double best = -1.0;
  for (const auto& [n, r] : ps.ranked)
    if (r.cursor < r.order.size())
      best = std::max(best, trueness(a.automaton().master(a.env(a.sys(n).parent).state)));
  ASSERT_GE(best, 0.0);
  auto sel = backtrack_select(a, ps, 1);
  ASSERT_EQ(sel.size(), 1U);
  EXPECT_EQ(trueness(a.automaton().master(a.env(a.sys(sel[0]).parent).state)), best);
}

TEST(Run, Examples) {
  BaselineHeuristic h;
  ExploreConfig cfg;
  EXPECT_EQ(run(parse_ltl("G (r <-> X g)"), part({"r"}, {"g"}), cfg, h).verdict, Verdict::Realizable);
  EXPECT_EQ(run(parse_ltl("G e & F !e"), part({"e"}, {}), cfg, h).verdict, Verdict::Unrealizable);
  EXPECT_EQ(run(parse_ltl("G (r -> F g)"), part({"r"}, {"g"}), cfg, h).verdict, Verdict::Realizable);
  EXPECT_EQ(run(parse_ltl("G (g <-> X r)"), part({"r"}, {"g"}), cfg, h).verdict, Verdict::Unrealizable);
  EXPECT_EQ(run(parse_ltl("F e"), part({"e"}, {"g"}), cfg, h).verdict, Verdict::Unrealizable);
}

TEST(Run, NodeCapGivesUnknown) {
  BaselineHeuristic h;
  ExploreConfig cfg;
  cfg.maxTotalNodes = 3;
  RunStats st = run(parse_ltl("G (r <-> X X X g)"), part({"r"}, {"g"}), cfg, h);
  EXPECT_EQ(st.verdict, Verdict::Unknown);
  EXPECT_FALSE(st.error.empty());
}

TEST(Run, TraceHasOneLinePerEvent) {
  BaselineHeuristic h;
  ExploreConfig cfg;
  std::ostringstream trace;
  cfg.trace = &trace;
  RunStats st = run(parse_ltl("G (r <-> X g)"), part({"r"}, {"g"}), cfg, h);
  std::istringstream in(trace.str());
  std::size_t expands = 0, solves = 0, backs = 0;
  for (std::string line; std::getline(in, line);) {
    expands += line.rfind("expand ", 0) == 0;
    solves += line.rfind("solve ", 0) == 0;
    backs += line.rfind("backtrack ", 0) == 0;
  }
  EXPECT_EQ(expands, st.expansions);
  EXPECT_EQ(solves, st.solves);
  EXPECT_EQ(backs, st.backtracks);
}

TEST(Run, AgreesWithOracleUnderAnyHeuristic) {
  std::mt19937_64 rng(2024);
  auto props = semsyn::testing::prop_ids({"a", "b", "c"});
  Partition p = part({"a"}, {"b", "c"});
  int checked = 0;
  while (checked < 120) {
    Formula f = semsyn::testing::random_formula(rng, props, 2 + static_cast<int>(rng() % 9));
    Verdict want;
    try {
      decompose(f);
      want = solve_full_oracle(f, p);
    } catch (const UnsupportedError&) {
      continue;
    } catch (const ResourceError&) {
      continue;
    }
    ++checked;
    BaselineHeuristic base;
    ReverseHeuristic rev;
    RandomHeuristic rnd(checked);
    ExploreConfig cfg;
    cfg.perStintNodeBudget = 1 + checked % 5;
    for (Heuristic* h : {static_cast<Heuristic*>(&base), static_cast<Heuristic*>(&rev),
                         static_cast<Heuristic*>(&rnd)}) {
      RunStats st = run(f, p, cfg, *h);
      EXPECT_EQ(st.verdict, want) << to_string(f) << " with " << h->name();
    }
  }
}

TEST(Run, RepeatedRunsAreIdentical) {
  Formula f = parse_ltl("G (r -> F g) & G (g -> X !g) & G F r");
  ExploreConfig cfg;
  cfg.perStintNodeBudget = 2;
  RandomHeuristic h1(3), h2(3);
  RunStats x = run(f, part({"r"}, {"g"}), cfg, h1);
  RunStats y = run(f, part({"r"}, {"g"}), cfg, h2);
  EXPECT_EQ(x.verdict, y.verdict);
  EXPECT_EQ(x.envNodes, y.envNodes);
  EXPECT_EQ(x.sysNodes, y.sysNodes);
  EXPECT_EQ(x.solves, y.solves);
  EXPECT_EQ(x.backtracks, y.backtracks);
}
