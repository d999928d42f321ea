#include "semsyn/explore.hpp"

#include <algorithm>
#include <memory>
#include <ostream>

#include "semsyn/errors.hpp"
#include "semsyn/measures.hpp"
#include "semsyn/psolve.hpp"

namespace semsyn {

namespace {

void grow(std::vector<char>& v, std::size_t n) {
  if (v.size() < n) v.resize(n, 0);
}

class Stint {
 public:
  Stint(PartialArena& a, PerspectiveState& ps, Heuristic& h, std::ostream* trace)
      : a_(a), ps_(ps), h_(h), trace_(trace) {}

  StintResult run(std::size_t budget) {
    std::size_t spent = 0;
    while (true) {
      while (!ps_.frontier.empty()) {
        NodeId n = a_.find_env(ps_.frontier.front());
        ps_.frontier.pop_front();
        grow(ps_.visitedEnv, a_.num_env());
        if (ps_.visitedEnv[n] || a_.decided_env(n)) continue;
        if (!a_.env(n).expanded) {
          if (spent >= budget) {
            ps_.frontier.push_front(n);
            return StintResult::BudgetExhausted;
          }
          a_.expand(n);
          ++spent;
          ++ps_.expansions;
          if (trace_)
            *trace_ << "expand " << player_name(ps_.player) << " node=" << n << " env=" << a_.live_env()
                    << " sys=" << a_.live_sys() << '\n';
          n = a_.find_env(n);
          grow(ps_.visitedEnv, a_.num_env());
          if (ps_.visitedEnv[n] || a_.decided_env(n)) continue;
        }
        visit_env(n);
      }
      if (!reseed()) return StintResult::ClosureReached;
    }
  }

  void visit_env(NodeId n) {
    ps_.visitedEnv[n] = 1;
    if (ps_.player == Player::Sys) {
      for (NodeId s : a_.env_children(n)) visit_sys(s);
      return;
    }
    std::vector<std::uint32_t> idx;
    std::vector<Candidate> cands;
    env_choice_candidates(a_, n, idx, cands);
    auto& r = ps_.ranked[n];
    r.order.clear();
    for (auto k : h_.rank(Choice{&a_.automaton(), a_.env(n).state, Player::Env}, cands)) r.order.push_back(idx[k]);
    r.cursor = 0;
    r.seq = ps_.nextSeq++;
    open_next(n, r);
  }

  void visit_sys(NodeId s) {
    s = a_.find_sys(s);
    grow(ps_.visitedSys, a_.num_sys());
    if (ps_.visitedSys[s]) return;
    ps_.visitedSys[s] = 1;
    if (a_.decided_sys(s)) return;
    if (ps_.player == Player::Env) {
      for (NodeId t : a_.sys_targets(s)) ps_.frontier.push_back(t);
      return;
    }
    std::vector<std::uint32_t> idx;
    std::vector<Candidate> cands;
    sys_choice_candidates(a_, s, idx, cands);
    StateId src = a_.env(a_.sys(s).parent).state;
    auto& r = ps_.ranked[s];
    r.order.clear();
    for (auto k : h_.rank(Choice{&a_.automaton(), src, Player::Sys}, cands)) r.order.push_back(idx[k]);
    r.cursor = 0;
    r.seq = ps_.nextSeq++;
    open_next(s, r);
  }

  // Opens the next ranked successor of an owned node.
  void open_next(NodeId owned, PerspectiveState::Ranked& r) {
    if (r.cursor >= r.order.size()) return;
    std::uint32_t i = r.order[r.cursor++];
    if (ps_.player == Player::Sys) {
      a_.activate_sys_choice(owned, i);
      ps_.frontier.push_back(a_.sys(owned).edges[i].target);
    } else {
      a_.activate_env_choice(owned, i);
      visit_sys(a_.env(owned).children[i].target);
    }
  }

  // Walks the perspective's view and queues whatever it still lacks, which
  // can happen after merges redirect edges. Returns false when nothing is
  // missing, i.e. the view is closed.
  bool reseed() {
    std::vector<char> seenEnv(a_.num_env(), 0), seenSys(a_.num_sys(), 0);
    std::vector<NodeId> stack{a_.initial()};
    bool missing = false;
    while (!stack.empty()) {
      NodeId n = a_.find_env(stack.back());
      stack.pop_back();
      if (seenEnv[n]) continue;
      seenEnv[n] = 1;
      if (a_.decided_env(n)) continue;
      grow(ps_.visitedEnv, a_.num_env());
      if (!a_.env(n).expanded || !ps_.visitedEnv[n]) {
        ps_.frontier.push_back(n);
        missing = true;
        continue;
      }
      std::vector<NodeId> kids;
      if (ps_.player == Player::Env) {
        for (auto i : a_.active_env_choices(n)) kids.push_back(a_.find_sys(a_.env(n).children[i].target));
      } else {
        kids = a_.env_children(n);
      }
      for (NodeId s : kids) {
        if (seenSys[s]) continue;
        seenSys[s] = 1;
        if (a_.decided_sys(s)) continue;
        grow(ps_.visitedSys, a_.num_sys());
        if (!ps_.visitedSys[s]) {
          visit_sys(s);
          missing = true;
        }
        if (ps_.player == Player::Sys) {
          const auto& act = a_.active_sys_choices(s);
          if (act.empty()) {
            // Visited before a merge made it the representative.
            auto it = ps_.ranked.find(s);
            if (it == ps_.ranked.end()) {
              ps_.visitedSys[s] = 0;
              visit_sys(s);
            } else {
              open_next(s, it->second);
            }
            missing = true;
          }
          for (auto i : a_.active_sys_choices(s)) stack.push_back(a_.sys(s).edges[i].target);
        } else {
          for (NodeId t : a_.sys_targets(s)) stack.push_back(t);
        }
      }
    }
    return missing;
  }

 private:
  PartialArena& a_;
  PerspectiveState& ps_;
  Heuristic& h_;
  std::ostream* trace_;
};

void record(PartialArena& a, const PartialOutcome& out) {
  for (const auto& [node, winner] : out.decided) {
    if (node.isSys) {
      a.set_decided_sys(node.id, winner);
    } else {
      a.set_decided_env(node.id, winner);
    }
  }
}

}  // namespace

void sys_choice_candidates(const PartialArena& a, NodeId s, std::vector<std::uint32_t>& idx,
                           std::vector<Candidate>& cands) {
  const SysNode& sn = a.sys(s);
  std::vector<std::pair<NodeId, std::uint32_t>> seen;
  for (std::uint32_t i = 0; i < sn.edges.size(); ++i) {
    const GroupedEdge& e = sn.edges[i];
    std::pair<NodeId, std::uint32_t> k{a.find_env(e.target), e.priority};
    if (std::find(seen.begin(), seen.end(), k) != seen.end()) continue;
    seen.push_back(k);
    idx.push_back(i);
    StateId q = a.env(k.first).state;
    cands.push_back({q, e.priority, candidate_key(q, e.priority, e.letter)});
  }
}

void env_choice_candidates(PartialArena& a, NodeId n, std::vector<std::uint32_t>& idx, std::vector<Candidate>& cands) {
  const EnvNode& en = a.env(n);
  std::vector<NodeId> seen;
  for (std::uint32_t i = 0; i < en.children.size(); ++i) {
    NodeId s = a.find_sys(en.children[i].target);
    if (std::find(seen.begin(), seen.end(), s) != seen.end()) continue;
    seen.push_back(s);
    idx.push_back(i);
    // The baseline-best reply stands in for the system node.
    std::vector<std::uint32_t> sidx;
    std::vector<Candidate> sc;
    sys_choice_candidates(a, s, sidx, sc);
    StateId src = a.env(a.sys(s).parent).state;
    Candidate best = sc[rank_baseline(Choice{&a.automaton(), src, Player::Sys}, sc)[0]];
    best.key = candidate_key(best.target, best.priority, en.children[i].letter);
    cands.push_back(best);
  }
}

StintResult explore_frontier(PartialArena& a, PerspectiveState& ps, Heuristic& h, std::size_t budget,
                             std::ostream* trace) {
  return Stint(a, ps, h, trace).run(budget);
}

std::vector<NodeId> backtrack_select(PartialArena& a, PerspectiveState& ps, std::size_t k) {
  struct Cand {
    NodeId node;
    double score;
    std::uint64_t seq;
  };
  std::vector<Cand> cands;
  const bool sys = ps.player == Player::Sys;
  for (auto& [node, r] : ps.ranked) {
    if (r.cursor >= r.order.size()) continue;
    if (sys ? (a.find_sys(node) != node || a.decided_sys(node)) : (a.find_env(node) != node || a.decided_env(node)))
      continue;
    StateId q = sys ? a.env(a.sys(node).parent).state : a.env(node).state;
    cands.push_back({node, trueness(a.automaton().master(q)), r.seq});
  }
  std::sort(cands.begin(), cands.end(), [&](const Cand& x, const Cand& y) {
    if (x.score != y.score) return sys ? x.score > y.score : x.score < y.score;
    return x.seq < y.seq;
  });
  if (cands.size() > k) cands.resize(k);
  std::vector<NodeId> out;
  for (const Cand& c : cands) {
    auto& r = ps.ranked[c.node];
    std::uint32_t i = r.order[r.cursor++];
    if (sys) {
      a.activate_sys_choice(c.node, i);
      ps.frontier.push_back(a.sys(c.node).edges[i].target);
    } else {
      a.activate_env_choice(c.node, i);
      NodeId s = a.find_sys(a.env(c.node).children[i].target);
      // The environment needs every reply of the newly opened system node.
      for (NodeId t : a.sys_targets(s)) ps.frontier.push_back(t);
      grow(ps.visitedSys, a.num_sys());
      ps.visitedSys[s] = 1;
    }
    out.push_back(c.node);
  }
  return out;
}

RunStats run(Formula f, const Partition& p, const ExploreConfig& cfg, Heuristic& h) {
  RunStats st;
  ArenaConfig ac;
  ac.merge = cfg.merge;
  ac.maxNodes = cfg.maxTotalNodes;
  ac.maxAp = cfg.maxAp;
  std::unique_ptr<PartialArena> arena;
  auto finish = [&] {
    if (arena) {
      st.envNodes = arena->live_env();
      st.sysNodes = arena->live_sys();
      st.expansions = arena->expansions();
      st.automatonStates = arena->automaton().num_states();
    }
    return st;
  };
  try {
    arena = std::make_unique<PartialArena>(f, p, ac);
    PartialArena& a = *arena;
    PerspectiveState ps[2] = {PerspectiveState(Player::Env), PerspectiveState(Player::Sys)};
    ps[0].frontier.push_back(a.initial());
    ps[1].frontier.push_back(a.initial());
    Player cur = Player::Sys;
    while (true) {
      PerspectiveState& s = ps[static_cast<int>(cur)];
      StintResult r = explore_frontier(a, s, h, cfg.perStintNodeBudget, cfg.trace);
      ++st.stints;
      if (r == StintResult::ClosureReached) {
        PartialOutcome out = solve_partial(a, cur);
        ++st.solves;
        record(a, out);
        if (cfg.trace)
          *cfg.trace << "solve " << player_name(cur) << " view=" << out.viewNodes << " verdict=" << verdict_name(out.verdict)
                     << '\n';
        if (out.verdict != Verdict::Unknown) {
          st.verdict = out.verdict;
          return finish();
        }
        auto sel = backtrack_select(a, s, cfg.backtrackFanout);
        ++st.backtracks;
        if (cfg.trace) *cfg.trace << "backtrack " << player_name(cur) << " selected=" << sel.size() << '\n';
        if (sel.empty()) {
          // Nothing left to open: settle by a full exact solve.
          explore_all(a);
          PartialOutcome full = solve_partial(a, cur);
          ++st.solves;
          st.verdict = full.verdict;
          return finish();
        }
      }
      cur = opponent(cur);
    }
  } catch (const ResourceError& e) {
    st.verdict = Verdict::Unknown;
    st.error = e.what();
    return finish();
  }
}

}  // namespace semsyn
