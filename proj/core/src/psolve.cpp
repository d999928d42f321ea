#include "semsyn/psolve.hpp"

#include <algorithm>
#include <deque>

#include "semsyn/errors.hpp"

namespace semsyn {

std::uint32_t ViewBuilder::add_node(Player owner, ViewNode origin) {
  owner_.push_back(owner);
  origin_.push_back(origin);
  out_.emplace_back();
  return static_cast<std::uint32_t>(owner_.size() - 1);
}

void ViewBuilder::add_edge(std::uint32_t from, std::uint32_t to, std::uint32_t priority) {
  out_[from].emplace_back(to, priority);
}

SolveView ViewBuilder::build() const {
  SolveView v;
  v.owner = owner_;
  v.origin = origin_;
  v.begin.push_back(0);
  for (const auto& edges : out_) {
    for (auto [t, p] : edges) {
      v.target.push_back(t);
      v.priority.push_back(p);
    }
    v.begin.push_back(static_cast<std::uint32_t>(v.target.size()));
  }
  return v;
}

namespace {

// Zielonka's algorithm on the game where every prioritized edge is thought of
// as split by a midpoint carrying its priority. Midpoints are never
// materialized: a subgame is a node mask plus an edge mask, and attracting a
// midpoint removes its edge.
class Zielonka {
 public:
  Zielonka(const SolveView& v, std::size_t budget) : v_(v), budget_(budget) {
    const std::size_t n = v.size();
    winner_.assign(n, Player::Env);
    std::vector<std::uint32_t> count(n + 1, 0);
    for (std::uint32_t e = 0; e < v.target.size(); ++e) ++count[v.target[e] + 1];
    for (std::size_t i = 0; i < n; ++i) count[i + 1] += count[i];
    revBegin_ = count;
    revEdge_.resize(v.target.size());
    source_.resize(v.target.size());
    for (std::uint32_t u = 0; u < n; ++u) {
      for (std::uint32_t e = v.begin[u]; e < v.begin[u + 1]; ++e) {
        source_[e] = u;
        revEdge_[count[v.target[e]]++] = e;
      }
    }
  }

  Regions run() {
    std::vector<std::uint32_t> nodes(v_.size());
    for (std::uint32_t i = 0; i < nodes.size(); ++i) nodes[i] = i;
    std::vector<char> inEdge(v_.target.size(), 1);
    solve(nodes, inEdge);
    return Regions{std::move(winner_)};
  }

 private:
  // `inEdge` already excludes edges leaving the node set.
  void solve(const std::vector<std::uint32_t>& nodes, const std::vector<char>& inEdge) {
    if (nodes.empty()) return;
    if (++calls_ > budget_) throw ResourceError("parity solver recursion budget exceeded");

    std::uint32_t d = kNeutral;
    for (auto u : nodes)
      for (std::uint32_t e = v_.begin[u]; e < v_.begin[u + 1]; ++e)
        if (inEdge[e]) d = std::min(d, v_.priority[e]);
    if (d == kNeutral) throw std::logic_error("subgame without a prioritized cycle");
    const Player alpha = d % 2 == 0 ? Player::Sys : Player::Env;
    const Player beta = opponent(alpha);

    // Attractor of alpha to the d-edges.
    std::vector<char> inA(v_.size(), 0);
    std::vector<std::uint32_t> pending(v_.size(), 0);
    std::deque<std::uint32_t> queue;
    for (auto u : nodes) {
      bool anyD = false;
      std::uint32_t other = 0;
      for (std::uint32_t e = v_.begin[u]; e < v_.begin[u + 1]; ++e) {
        if (!inEdge[e]) continue;
        if (v_.priority[e] == d) {
          anyD = true;
        } else {
          ++other;
        }
      }
      pending[u] = other;
      if ((v_.owner[u] == alpha && anyD) || (v_.owner[u] == beta && other == 0)) {
        inA[u] = 1;
        queue.push_back(u);
      }
    }
    while (!queue.empty()) {
      auto w = queue.front();
      queue.pop_front();
      for (std::uint32_t i = revBegin_[w]; i < revBegin_[w + 1]; ++i) {
        std::uint32_t e = revEdge_[i];
        std::uint32_t u = source_[e];
        if (!inEdge[e] || inA[u]) continue;
        if (v_.owner[u] == alpha) {
          inA[u] = 1;
          queue.push_back(u);
        } else if (v_.priority[e] != d && --pending[u] == 0) {
          inA[u] = 1;
          queue.push_back(u);
        }
      }
    }

    std::vector<std::uint32_t> sub;
    std::vector<char> subNode(v_.size(), 0), subEdge(inEdge.size(), 0);
    for (auto u : nodes)
      if (!inA[u]) {
        sub.push_back(u);
        subNode[u] = 1;
      }
    for (auto u : sub)
      for (std::uint32_t e = v_.begin[u]; e < v_.begin[u + 1]; ++e)
        subEdge[e] = inEdge[e] && subNode[v_.target[e]] && v_.priority[e] != d;
    solve(sub, subEdge);

    std::vector<std::uint32_t> lost;
    for (auto u : sub)
      if (winner_[u] == beta) lost.push_back(u);
    if (lost.empty()) {
      for (auto u : nodes) winner_[u] = alpha;
      return;
    }

    // Attractor of beta to its region in the subgame, inside the whole game.
    std::vector<char> inB(v_.size(), 0);
    for (auto u : nodes) {
      std::uint32_t outs = 0;
      for (std::uint32_t e = v_.begin[u]; e < v_.begin[u + 1]; ++e) outs += inEdge[e] ? 1 : 0;
      pending[u] = outs;
    }
    for (auto u : lost) {
      inB[u] = 1;
      queue.push_back(u);
    }
    while (!queue.empty()) {
      auto w = queue.front();
      queue.pop_front();
      for (std::uint32_t i = revBegin_[w]; i < revBegin_[w + 1]; ++i) {
        std::uint32_t e = revEdge_[i];
        std::uint32_t u = source_[e];
        if (!inEdge[e] || inB[u]) continue;
        if (v_.owner[u] == beta || --pending[u] == 0) {
          inB[u] = 1;
          queue.push_back(u);
        }
      }
    }

    std::vector<std::uint32_t> rest;
    std::vector<char> restNode(v_.size(), 0), restEdge(inEdge.size(), 0);
    for (auto u : nodes)
      if (!inB[u]) {
        rest.push_back(u);
        restNode[u] = 1;
      }
    for (auto u : rest)
      for (std::uint32_t e = v_.begin[u]; e < v_.begin[u + 1]; ++e)
        restEdge[e] = inEdge[e] && restNode[v_.target[e]];
    solve(rest, restEdge);
    for (auto u : nodes)
      if (inB[u]) winner_[u] = beta;
  }

  const SolveView& v_;
  std::size_t budget_;
  std::size_t calls_ = 0;
  std::vector<Player> winner_;
  std::vector<std::uint32_t> revBegin_, revEdge_, source_;
};

}  // namespace

Regions zielonka(const SolveView& v, std::size_t depthBudget) { return Zielonka(v, depthBudget).run(); }

SolveView partial_view(const PartialArena& a, Player perspective) {
  ViewBuilder b;
  std::vector<std::uint32_t> envIdx(a.num_env(), kNoNode), sysIdx(a.num_sys(), kNoNode);
  std::vector<ViewNode> work;
  bool exact = true;
  auto sinkPriority = [](Player w) { return w == Player::Sys ? 0U : 1U; };

  auto envNode = [&](NodeId n) {
    n = a.find_env(n);
    if (envIdx[n] == kNoNode) {
      envIdx[n] = b.add_node(Player::Env, {false, n});
      work.push_back({false, n});
    }
    return envIdx[n];
  };
  auto sysNode = [&](NodeId s) {
    if (sysIdx[s] == kNoNode) {
      sysIdx[s] = b.add_node(Player::Sys, {true, s});
      work.push_back({true, s});
    }
    return sysIdx[s];
  };

  envNode(a.initial());
  for (std::size_t i = 0; i < work.size(); ++i) {
    ViewNode w = work[i];
    if (!w.isSys) {
      std::uint32_t u = envIdx[w.id];
      if (auto d = a.decided_env(w.id)) {
        b.add_edge(u, u, sinkPriority(*d));
      } else if (!a.env(w.id).expanded) {
        exact = false;
        b.add_edge(u, u, sinkPriority(opponent(perspective)));
      } else {
        for (NodeId c : a.env_children(w.id)) b.add_edge(u, sysNode(c), kNeutral);
      }
    } else {
      std::uint32_t u = sysIdx[w.id];
      if (auto d = a.decided_sys(w.id)) {
        b.add_edge(u, u, sinkPriority(*d));
      } else {
        for (const GroupedEdge& e : a.sys(w.id).edges) b.add_edge(u, envNode(e.target), e.priority);
      }
    }
  }
  SolveView v = b.build();
  v.initial = 0;
  v.exact = exact;
  return v;
}

PartialOutcome solve_partial(const PartialArena& a, Player perspective) {
  SolveView v = partial_view(a, perspective);
  Regions r = zielonka(v);
  PartialOutcome out;
  out.viewNodes = v.size();
  for (std::uint32_t i = 0; i < v.size(); ++i) {
    if (r.winner[i] == perspective || v.exact) out.decided.emplace_back(v.origin[i], r.winner[i]);
  }
  Player w = r.winner[v.initial];
  if (w == perspective || v.exact) out.verdict = w == Player::Sys ? Verdict::Realizable : Verdict::Unrealizable;
  return out;
}

Verdict solve_full_oracle(Formula f, const Partition& p, OracleConfig cfg) {
  ArenaConfig ac;
  ac.merge = cfg.merge;
  ac.maxNodes = cfg.maxNodes;
  ac.maxAp = cfg.maxAp;
  PartialArena a(f, p, ac);
  explore_all(a);
  SolveView v = partial_view(a, Player::Sys);
  Regions r = zielonka(v);
  return r.winner[v.initial] == Player::Sys ? Verdict::Realizable : Verdict::Unrealizable;
}

}  // namespace semsyn
