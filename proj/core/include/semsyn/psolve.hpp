#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "semsyn/arena.hpp"

namespace semsyn {

/// Priority of environment-to-system edges: never the minimum on a cycle.
inline constexpr std::uint32_t kNeutral = std::numeric_limits<std::uint32_t>::max();

struct ViewNode {
  bool isSys;
  NodeId id;
};

/// Finite game graph with edge priorities under min-parity. The system player
/// is Even. Nodes are dense indices; edges are stored in CSR form.
struct SolveView {
  std::vector<Player> owner;
  std::vector<std::uint32_t> begin;  // size n + 1
  std::vector<std::uint32_t> target;
  std::vector<std::uint32_t> priority;
  std::vector<ViewNode> origin;      // arena node behind each view node
  std::uint32_t initial = 0;
  bool exact = true;                 // no unexplored node was turned into a sink

  std::size_t size() const { return owner.size(); }
};

/// Builder for views over arbitrary graphs (tests, ground truth).
class ViewBuilder {
 public:
  std::uint32_t add_node(Player owner, ViewNode origin = {false, kNoNode});
  void add_edge(std::uint32_t from, std::uint32_t to, std::uint32_t priority);
  SolveView build() const;

 private:
  std::vector<Player> owner_;
  std::vector<ViewNode> origin_;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> out_;
};

/// winner[v] is the player winning from v.
struct Regions {
  std::vector<Player> winner;
  bool wins(std::uint32_t v, Player p) const { return winner[v] == p; }
};

/// Recursive attractor-based parity solver reading priorities on edges.
/// Throws ResourceError past `depthBudget` nested calls.
Regions zielonka(const SolveView& v, std::size_t depthBudget = 1'000'000);

/// View of the nodes reachable from the initial node. Unexpanded nodes
/// become sinks losing for `perspective`; decided nodes become sinks for
/// their recorded winner.
SolveView partial_view(const PartialArena& a, Player perspective);

struct PartialOutcome {
  Verdict verdict = Verdict::Unknown;
  /// Arena nodes won by the perspective (sound); when the view was exact,
  /// also those won by the opponent.
  std::vector<std::pair<ViewNode, Player>> decided;
  std::size_t viewNodes = 0;
};

/// Solves the explored part pessimistically for `perspective`.
PartialOutcome solve_partial(const PartialArena& a, Player perspective);

struct OracleConfig {
  bool merge = true;
  std::size_t maxNodes = 200'000;
  std::size_t maxAp = 16;
};

/// Builds the full reachable arena and solves it exactly.
Verdict solve_full_oracle(Formula f, const Partition& p, OracleConfig cfg = {});

}  // namespace semsyn
