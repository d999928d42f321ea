#include <gtest/gtest.h>

#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "two_route_game.hpp"
#include "random_formula.hpp"
#include "semsyn/arena.hpp"
#include "semsyn/errors.hpp"
#include "semsyn/parser.hpp"
#include "semsyn/psolve.hpp"

using namespace semsyn;

namespace {

Partition part(std::vector<std::string> env, std::vector<std::string> sys) {
  return Partition::from_names(env, sys);
}

std::uint32_t letter_sum(const std::vector<GroupedEdge>& es) {
  std::uint32_t n = 0;
  for (const auto& e : es) n += e.letters;
  return n;
}

// Random supported game instance over env {a} and sys {b, c}.
std::optional<Formula> random_instance(std::mt19937_64& rng, int budget) {
  auto props = semsyn::testing::prop_ids({"a", "b", "c"});
  Formula f = semsyn::testing::random_formula(rng, props, budget);
  try {
    decompose(f);
  } catch (const UnsupportedError&) {
    return std::nullopt;
  }
  return f;
}

}  // namespace

TEST(Arena, ExpandSplitsByEnvThenSys) {
  PartialArena a(parse_ltl("G (r <-> X g)"), part({"r"}, {"g"}));
  EXPECT_FALSE(closed(a, Player::Sys));
  a.expand(a.initial());
  const EnvNode& root = a.env(a.initial());
  ASSERT_TRUE(root.expanded);
  EXPECT_EQ(root.children.size(), 2U);
  EXPECT_EQ(letter_sum(root.children), 2U);
  for (const auto& c : root.children) EXPECT_EQ(letter_sum(a.sys(a.find_sys(c.target)).edges), 2U);
}

TEST(Arena, TerminalTrueLoopsWithPriorityZero) {
  PartialArena a(tt(), part({"r"}, {"g"}));
  a.expand(a.initial());
  const EnvNode& root = a.env(a.initial());
  ASSERT_EQ(root.children.size(), 1U);
  const SysNode& s = a.sys(root.children[0].target);
  ASSERT_EQ(s.edges.size(), 1U);
  EXPECT_EQ(a.find_env(s.edges[0].target), a.initial());
  EXPECT_EQ(s.edges[0].priority, 0U);
}

TEST(Arena, MergesSystemNodesWithEqualEdges) {
  Formula f = parse_ltl("G F g");
  ArenaConfig off;
  off.merge = false;
  PartialArena merged(f, part({"r"}, {"g"}));
  PartialArena plain(f, part({"r"}, {"g"}), off);
  merged.expand(merged.initial());
  plain.expand(plain.initial());
  EXPECT_EQ(merged.env(merged.initial()).children.size(), 1U);
  EXPECT_EQ(plain.env(plain.initial()).children.size(), 2U);
  EXPECT_EQ(plain.num_sys(), merged.num_sys() + 1);
}

TEST(Arena, DoesNotMergeOnDifferentPriority) {
  // Somewhere in this arena two system moves reach the same node, one with a
  // good and one with a bad priority; they must stay apart.
  PartialArena a(parse_ltl("G F r"), part({"r"}, {"g"}));
  explore_all(a);
  int pairs = 0;
  for (NodeId x = 0; x < a.num_sys(); ++x) {
    if (a.find_sys(x) != x) continue;
    for (NodeId y = x + 1; y < a.num_sys(); ++y) {
      if (a.find_sys(y) != y) continue;
      const auto &ex = a.sys(x).edges, &ey = a.sys(y).edges;
      if (ex.size() == 1 && ey.size() == 1 && a.find_env(ex[0].target) == a.find_env(ey[0].target)) {
        EXPECT_NE(ex[0].priority, ey[0].priority);
        ++pairs;
      }
    }
  }
  EXPECT_GE(pairs, 1);
}

TEST(Arena, ClosedRequiresOpenedChoices) {
  PartialArena a(tt(), part({"r"}, {"g"}));
  EXPECT_FALSE(closed(a, Player::Sys));
  a.expand(a.initial());
  EXPECT_FALSE(closed(a, Player::Sys));
  const NodeId s = a.env(a.initial()).children[0].target;
  a.activate_sys_choice(s, 0);
  EXPECT_TRUE(closed(a, Player::Sys));
  EXPECT_FALSE(closed(a, Player::Env));
  a.activate_env_choice(a.initial(), 0);
  EXPECT_TRUE(closed(a, Player::Env));
}

TEST(Arena, BudgetAndApCap) {
  ArenaConfig small;
  small.maxNodes = 3;
  PartialArena a(parse_ltl("G (r -> X X X g)"), part({"r"}, {"g"}), small);
  EXPECT_THROW(explore_all(a), ResourceError);
  ArenaConfig cap;
  cap.maxAp = 1;
  EXPECT_THROW(PartialArena(parse_ltl("G (r -> F g)"), part({"r"}, {"g"}), cap), ResourceError);
}

TEST(Arena, DotExport) {
  PartialArena a(parse_ltl("G (r -> F g)"), part({"r"}, {"g"}));
  explore_all(a);
  std::ostringstream out;
  a.write_dot(out);
  EXPECT_NE(out.str().find("digraph arena"), std::string::npos);
}

TEST(Zielonka, SingleNodes) {
  for (std::uint32_t p : {0U, 1U, 4U, 7U}) {
    ViewBuilder b;
    auto n = b.add_node(Player::Env);
    b.add_edge(n, n, p);
    Regions r = zielonka(b.build());
    EXPECT_EQ(r.winner[0], p % 2 == 0 ? Player::Sys : Player::Env);
  }
}

// u -> v1, u -> w, w -> v2, v1 <-> v2, v1/v2 -> goal, goal loops.
TEST(Zielonka, TwoRouteGameAllWinning) {
  Regions r = zielonka(semsyn::testing::two_route_game(Player::Sys));
  for (auto w : r.winner) EXPECT_EQ(w, Player::Sys);
  // With the environment choosing, it cycles v1 <-> v2 forever.
  Regions e = zielonka(semsyn::testing::two_route_game(Player::Env));
  for (std::uint32_t v = 0; v < 4; ++v) EXPECT_EQ(e.winner[v], Player::Env);
  EXPECT_EQ(e.winner[4], Player::Sys);
}

TEST(Zielonka, NeutralEdgesAndPriorityOnEdges) {
  // Env chooses between two system nodes; one can only close a bad cycle.
  ViewBuilder b;
  auto e = b.add_node(Player::Env), s1 = b.add_node(Player::Sys), s2 = b.add_node(Player::Sys);
  b.add_edge(e, s1, kNeutral);
  b.add_edge(e, s2, kNeutral);
  b.add_edge(s1, e, 2);
  b.add_edge(s2, e, 2);
  b.add_edge(s2, e, 3);
  Regions r = zielonka(b.build());
  EXPECT_EQ(r.winner[e], Player::Sys);
  EXPECT_EQ(r.winner[s2], Player::Sys);
}

TEST(Zielonka, BudgetIsEnforced) {
  EXPECT_THROW(zielonka(semsyn::testing::two_route_game(Player::Env), 1), ResourceError);
}

namespace {

SolveView random_view(std::mt19937_64& rng, std::size_t n) {
  ViewBuilder b;
  for (std::size_t i = 0; i < n; ++i) b.add_node((rng() & 1U) ? Player::Sys : Player::Env);
  for (std::uint32_t i = 0; i < n; ++i) {
    int outs = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < outs; ++k) b.add_edge(i, static_cast<std::uint32_t>(rng() % n), static_cast<std::uint32_t>(rng() % 6));
  }
  return b.build();
}

// Brute force over positional strategies of both players.
std::vector<Player> brute_force(const SolveView& v) {
  const std::size_t n = v.size();
  std::vector<Player> out(n);
  std::vector<std::uint32_t> choice(n, 0);
  auto cycle_winner = [&](std::uint32_t start, const std::vector<std::uint32_t>& pick) {
    std::vector<int> seen(n, -1);
    std::vector<std::uint32_t> prios;
    std::uint32_t u = start;
    int step = 0;
    while (seen[u] < 0) {
      seen[u] = step++;
      std::uint32_t e = v.begin[u] + pick[u];
      prios.push_back(v.priority[e]);
      u = v.target[e];
    }
    std::uint32_t m = kNeutral;
    for (std::size_t i = static_cast<std::size_t>(seen[u]); i < prios.size(); ++i) m = std::min(m, prios[i]);
    return m % 2 == 0 ? Player::Sys : Player::Env;
  };
  // For each node: sys wins iff exists sys strategy such that for all env strategies the play is even.
  std::vector<std::uint32_t> sysNodes, envNodes;
  for (std::uint32_t u = 0; u < n; ++u) (v.owner[u] == Player::Sys ? sysNodes : envNodes).push_back(u);
  auto enumerate = [&](const std::vector<std::uint32_t>& nodes, std::vector<std::uint32_t>& pick, auto&& body) {
    std::fill(pick.begin(), pick.end(), 0);
    while (true) {
      if (body()) return true;
      std::size_t i = 0;
      for (; i < nodes.size(); ++i) {
        auto u = nodes[i];
        if (++pick[u] < v.begin[u + 1] - v.begin[u]) break;
        pick[u] = 0;
      }
      if (i == nodes.size()) return false;
    }
  };
  for (std::uint32_t s = 0; s < n; ++s) {
    std::vector<std::uint32_t> sysPick(n, 0), envPick(n, 0);
    bool sysWins = enumerate(sysNodes, sysPick, [&] {
      bool envBeats = enumerate(envNodes, envPick, [&] {
        std::vector<std::uint32_t> pick(n);
        for (std::uint32_t u = 0; u < n; ++u) pick[u] = v.owner[u] == Player::Sys ? sysPick[u] : envPick[u];
        return cycle_winner(s, pick) == Player::Env;
      });
      return !envBeats;
    });
    out[s] = sysWins ? Player::Sys : Player::Env;
  }
  return out;
}

}  // namespace

TEST(Zielonka, AgreesWithBruteForceOnRandomViews) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    SolveView v = random_view(rng, 2 + rng() % 6);
    EXPECT_EQ(zielonka(v).winner, brute_force(v)) << "view " << i;
  }
}

TEST(Zielonka, DualityOnRandomViews) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    SolveView v = random_view(rng, 2 + rng() % 10);
    SolveView d = v;
    for (auto& o : d.owner) o = opponent(o);
    for (auto& p : d.priority) ++p;
    Regions a = zielonka(v), b = zielonka(d);
    for (std::size_t u = 0; u < v.size(); ++u) EXPECT_EQ(a.winner[u], opponent(b.winner[u]));
  }
}

TEST(Oracle, Examples) {
  EXPECT_EQ(solve_full_oracle(parse_ltl("G (r <-> X g)"), part({"r"}, {"g"})), Verdict::Realizable);
  EXPECT_EQ(solve_full_oracle(parse_ltl("F e"), part({"e"}, {})), Verdict::Unrealizable);
  EXPECT_EQ(solve_full_oracle(parse_ltl("G (r -> F g)"), part({"r"}, {"g"})), Verdict::Realizable);
  EXPECT_EQ(solve_full_oracle(parse_ltl("G (g <-> X r)"), part({"r"}, {"g"})), Verdict::Unrealizable);
  EXPECT_EQ(solve_full_oracle(parse_ltl("G e & F !e"), part({"e"}, {})), Verdict::Unrealizable);
  EXPECT_THROW(solve_full_oracle(parse_ltl("G (r -> X X X X g)"), part({"r"}, {"g"}), {true, 5, 16}), ResourceError);
}

TEST(Oracle, MergingPreservesVerdicts) {
  std::mt19937_64 rng(5);
  int n = 0;
  auto p = part({"a"}, {"b", "c"});
  while (n < 200) {
    auto f = random_instance(rng, 2 + static_cast<int>(rng() % 12));
    if (!f) continue;
    ++n;
    EXPECT_EQ(solve_full_oracle(*f, p, {true}), solve_full_oracle(*f, p, {false})) << to_string(*f);
  }
}

TEST(Oracle, MergedSignaturesAreUnique) {
  std::mt19937_64 rng(6);
  auto p = part({"a"}, {"b", "c"});
  for (int n = 0; n < 50;) {
    auto f = random_instance(rng, 2 + static_cast<int>(rng() % 12));
    if (!f) continue;
    ++n;
    PartialArena a(*f, p);
    explore_all(a);
    std::set<std::vector<std::uint64_t>> sigs, envSigs;
    for (NodeId s = 0; s < a.num_sys(); ++s) {
      if (a.find_sys(s) != s) continue;
      std::vector<std::uint64_t> sig;
      for (const auto& e : a.sys(s).edges) sig.push_back(std::uint64_t{a.find_env(e.target)} << 32 | e.priority);
      std::sort(sig.begin(), sig.end());
      sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
      EXPECT_TRUE(sigs.insert(sig).second) << to_string(*f);
    }
    for (NodeId n = 0; n < a.num_env(); ++n) {
      if (a.find_env(n) != n || !a.env(n).expanded) continue;
      auto kids = a.env_children(n);
      std::vector<std::uint64_t> sig(kids.begin(), kids.end());
      std::sort(sig.begin(), sig.end());
      EXPECT_TRUE(envSigs.insert(sig).second) << to_string(*f);
    }
  }
}

TEST(SolvePartial, AllPathsToTrueAreRealizable) {
  PartialArena a(parse_ltl("F g"), part({"r"}, {"g"}));
  a.expand(a.initial());
  for (const auto& c : a.env(a.initial()).children) {
    for (const auto& e : a.sys(a.find_sys(c.target)).edges) a.expand(e.target);
  }
  EXPECT_EQ(solve_partial(a, Player::Sys).verdict, Verdict::Realizable);
}

TEST(SolvePartial, PessimisticViewStaysUnknown) {
  PartialArena a(parse_ltl("G (r -> X g)"), part({"r"}, {"g"}));
  a.expand(a.initial());
  PartialOutcome o = solve_partial(a, Player::Sys);
  EXPECT_EQ(o.verdict, Verdict::Unknown);
}

TEST(SolvePartial, EnvironmentWithholdsEventuality) {
  Formula f = parse_ltl("F e");
  PartialArena a(f, part({"e"}, {}));
  // Expand only along the letter !e.
  NodeId n = a.initial();
  for (int i = 0; i < 4; ++i) {
    a.expand(n);
    n = a.find_env(n);
    const auto& kids = a.env(n).children;
    NodeId s = a.find_sys(kids[0].letter == 0 ? kids[0].target : kids[1].target);
    n = a.find_env(a.sys(s).edges[0].target);
    if (a.env(n).expanded) break;
  }
  EXPECT_EQ(solve_partial(a, Player::Env).verdict, Verdict::Unrealizable);
  EXPECT_EQ(solve_full_oracle(f, part({"e"}, {})), Verdict::Unrealizable);
}

TEST(SolvePartial, FinalVerdictsMatchOracle) {
  std::mt19937_64 rng(8);
  auto p = part({"a"}, {"b", "c"});
  for (int n = 0; n < 100;) {
    auto f = random_instance(rng, 2 + static_cast<int>(rng() % 10));
    if (!f) continue;
    ++n;
    Verdict truth = solve_full_oracle(*f, p);
    PartialArena a(*f, p);
    // Expand a random prefix of the arena.
    std::vector<NodeId> work{a.initial()};
    for (int k = 0; k < 6 && !work.empty(); ++k) {
      NodeId x = work[rng() % work.size()];
      for (NodeId c : a.expand(x)) work.push_back(c);
    }
    for (Player pl : {Player::Sys, Player::Env}) {
      Verdict v = solve_partial(a, pl).verdict;
      if (v != Verdict::Unknown) EXPECT_EQ(v, truth) << to_string(*f);
    }
  }
}
