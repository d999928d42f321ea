#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "semsyn/automaton.hpp"

namespace semsyn {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

enum class Verdict : std::uint8_t { Realizable, Unrealizable, Unknown };
const char* verdict_name(Verdict v);

/// Grouped edge: all letters with the same (target, priority) stored once.
/// `letter` is the smallest letter of the group and serves as its tie key.
struct GroupedEdge {
  NodeId target;
  std::uint32_t priority;  // unused on environment edges
  std::uint32_t letters;
  std::uint64_t letter;
};

/// Environment move from an automaton state: children are system nodes, one
/// per environment letter (grouped).
struct EnvNode {
  StateId state;
  bool expanded = false;
  std::vector<GroupedEdge> children;
};

/// System move after environment letter `envLetter` was read at `parent`.
/// Edges go to environment nodes and carry automaton priorities.
struct SysNode {
  NodeId parent;
  std::uint64_t envLetter;
  std::vector<GroupedEdge> edges;
};

struct ArenaConfig {
  bool merge = true;
  std::size_t maxAp = 16;
  std::size_t maxNodes = 2'000'000;
};

/// Explored fragment of the game for one formula. Node ids of merged-away
/// nodes stay valid; `find_env` / `find_sys` map them to representatives.
/// Stored edge targets are raw ids. System nodes are merged on creation,
/// environment nodes once expanded, and merges cascade to predecessors.
class PartialArena {
 public:
  PartialArena(Formula f, Partition p, ArenaConfig cfg = {});

  Automaton& automaton() { return *aut_; }
  const Automaton& automaton() const { return *aut_; }
  const Partition& partition() const { return aut_->partition(); }
  const ArenaConfig& config() const { return cfg_; }

  NodeId initial() const { return find_env(0); }
  NodeId find_env(NodeId n) const;
  NodeId find_sys(NodeId s) const;

  const EnvNode& env(NodeId n) const { return envs_[n]; }
  const SysNode& sys(NodeId n) const { return syss_[n]; }
  std::size_t num_env() const { return envs_.size(); }
  std::size_t num_sys() const { return syss_.size(); }
  /// Representatives only.
  std::size_t live_env() const { return envs_.size() - mergedEnv_; }
  std::size_t live_sys() const { return syss_.size() - mergedSys_; }
  std::size_t expansions() const { return expansions_; }

  /// Expands an unexpanded environment node. Returns the environment nodes
  /// created by this call. The node may be merged afterwards.
  std::vector<NodeId> expand(NodeId n);

  /// Distinct representative targets of a system node, in edge order.
  std::vector<NodeId> sys_targets(NodeId s) const;
  /// Distinct representative children of an environment node.
  std::vector<NodeId> env_children(NodeId n) const;

  /// Winner recorded for a node by a sound solve, if any.
  std::optional<Player> decided_env(NodeId n) const;
  std::optional<Player> decided_sys(NodeId s) const;
  void set_decided_env(NodeId n, Player winner);
  void set_decided_sys(NodeId s, Player winner);

  /// Successors opened by the perspective that owns the node: environment
  /// children for the environment perspective, system edges for the system
  /// perspective. Indices refer to `children` / `edges`.
  void activate_env_choice(NodeId n, std::uint32_t child);
  void activate_sys_choice(NodeId s, std::uint32_t edge);
  const std::vector<std::uint32_t>& active_env_choices(NodeId n) const;
  const std::vector<std::uint32_t>& active_sys_choices(NodeId s) const;

  void write_dot(std::ostream& out) const;

 private:
  NodeId env_node_for(StateId q, std::vector<NodeId>& created);
  NodeId intern_sys(NodeId parent, std::uint64_t envLetter, std::vector<GroupedEdge> edges);
  void check_budget() const;
  std::vector<std::uint64_t> sys_signature(NodeId s) const;
  std::vector<std::uint64_t> env_signature(NodeId n) const;
  void cascade(std::vector<std::pair<bool, NodeId>> work);

  struct VecHash {
    std::size_t operator()(const std::vector<std::uint64_t>& v) const noexcept;
  };

  ArenaConfig cfg_;
  std::unique_ptr<Automaton> aut_;
  std::vector<EnvNode> envs_;
  std::vector<SysNode> syss_;
  mutable std::vector<NodeId> envParent_, sysParent_;
  std::size_t mergedEnv_ = 0, mergedSys_ = 0;
  std::vector<std::vector<NodeId>> envPreds_, sysPreds_;
  std::vector<std::vector<std::uint64_t>> envSigOf_, sysSigOf_;
  std::size_t expansions_ = 0;
  std::unordered_map<StateId, NodeId> envOfState_;
  std::unordered_map<std::vector<std::uint64_t>, NodeId, VecHash> sysSig_;
  std::unordered_map<std::vector<std::uint64_t>, NodeId, VecHash> envSig_;
  std::vector<std::int8_t> envWinner_, sysWinner_;
  std::vector<std::vector<std::uint32_t>> envActive_, sysActive_;
};

/// True when, from the initial node, every reachable node owned by
/// `perspective` has an opened successor, every opponent node has all
/// successors present, and every reachable environment node is expanded.
/// Decided nodes count as leaves.
bool closed(const PartialArena& a, Player perspective);

/// Expands every reachable environment node.
void explore_all(PartialArena& a);

}  // namespace semsyn
