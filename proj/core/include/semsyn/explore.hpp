#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "semsyn/arena.hpp"
#include "semsyn/guide.hpp"

namespace semsyn {

struct ExploreConfig {
  std::size_t perStintNodeBudget = 4096;
  std::size_t backtrackFanout = 8;
  std::size_t maxTotalNodes = 2'000'000;
  std::size_t maxAp = 16;
  bool merge = true;
  /// One line per expansion, solve and backtrack when set.
  std::ostream* trace = nullptr;
};

/// Exploration state of one player. The perspective owns system nodes when
/// it is the system and environment nodes when it is the environment; for
/// owned nodes it keeps the ranked successors and how many are opened.
struct PerspectiveState {
  explicit PerspectiveState(Player p) : player(p) {}

  struct Ranked {
    std::vector<std::uint32_t> order;  // edge (system) or child (environment) indices, best first
    std::uint32_t cursor = 0;          // number of opened entries
    std::uint64_t seq = 0;             // insertion order
  };

  Player player;
  std::deque<NodeId> frontier;
  std::vector<char> visitedEnv, visitedSys;
  std::unordered_map<NodeId, Ranked> ranked;
  std::uint64_t nextSeq = 0;
  std::size_t expansions = 0;
};

/// Distinct choices of a system node (by representative target and
/// priority): indices into its edges and the matching candidates.
void sys_choice_candidates(const PartialArena& a, NodeId s, std::vector<std::uint32_t>& idx,
                           std::vector<Candidate>& cands);

/// Distinct choices of an expanded environment node: indices into its
/// children, each represented by the baseline-best successor of the system
/// node it reaches.
void env_choice_candidates(PartialArena& a, NodeId n, std::vector<std::uint32_t>& idx, std::vector<Candidate>& cands);

enum class StintResult : std::uint8_t { ClosureReached, BudgetExhausted };

/// Expands frontier nodes, opening only the top-ranked successor of every
/// owned node, until the perspective's view is closed or `budget`
/// expansions were spent.
StintResult explore_frontier(PartialArena& a, PerspectiveState& ps, Heuristic& h, std::size_t budget,
                             std::ostream* trace = nullptr);

/// Reopens up to k not fully opened owned nodes: highest trueness of the
/// environment node's label for the system, lowest for the environment,
/// ties by insertion order. Each selected node opens its next successor.
std::vector<NodeId> backtrack_select(PartialArena& a, PerspectiveState& ps, std::size_t k);

struct RunStats {
  Verdict verdict = Verdict::Unknown;
  std::size_t envNodes = 0;
  std::size_t sysNodes = 0;
  std::size_t expansions = 0;
  std::size_t solves = 0;
  std::size_t backtracks = 0;
  std::size_t stints = 0;
  std::size_t automatonStates = 0;
  std::string error;  // set when the verdict is UNKNOWN because of a budget
};

/// Alternating on-the-fly exploration starting with the system perspective.
RunStats run(Formula f, const Partition& p, const ExploreConfig& cfg, Heuristic& h);

}  // namespace semsyn
