#include "semsyn/arena.hpp"

#include <algorithm>
#include <ostream>

#include "semsyn/errors.hpp"

namespace semsyn {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Realizable:
      return "REALIZABLE";
    case Verdict::Unrealizable:
      return "UNREALIZABLE";
    case Verdict::Unknown:
      return "UNKNOWN";
  }
  return "?";
}

std::size_t PartialArena::VecHash::operator()(const std::vector<std::uint64_t>& v) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ v.size();
  for (auto x : v) {
    h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

PartialArena::PartialArena(Formula f, Partition p, ArenaConfig cfg) : cfg_(cfg) {
  p.check_covers(f);
  if (p.width() > cfg_.maxAp)
    throw ResourceError("too many propositions: " + std::to_string(p.width()) + " > " + std::to_string(cfg_.maxAp));
  aut_ = std::make_unique<Automaton>(f, std::move(p));
  std::vector<NodeId> created;
  env_node_for(aut_->initial(), created);
}

namespace {

NodeId find_root(std::vector<NodeId>& parent, NodeId n) {
  NodeId r = n;
  while (parent[r] != r) r = parent[r];
  while (parent[n] != r) {
    NodeId next = parent[n];
    parent[n] = r;
    n = next;
  }
  return r;
}

}  // namespace

NodeId PartialArena::find_env(NodeId n) const { return find_root(envParent_, n); }
NodeId PartialArena::find_sys(NodeId s) const { return find_root(sysParent_, s); }

void PartialArena::check_budget() const {
  if (envs_.size() + syss_.size() > cfg_.maxNodes)
    throw ResourceError("arena node budget exceeded (" + std::to_string(cfg_.maxNodes) + ")");
}

NodeId PartialArena::env_node_for(StateId q, std::vector<NodeId>& created) {
  if (auto it = envOfState_.find(q); it != envOfState_.end()) return it->second;
  check_budget();
  auto id = static_cast<NodeId>(envs_.size());
  envs_.push_back(EnvNode{q, false, {}});
  envParent_.push_back(id);
  envWinner_.push_back(-1);
  envActive_.emplace_back();
  envPreds_.emplace_back();
  envSigOf_.emplace_back();
  envOfState_.emplace(q, id);
  created.push_back(id);
  return id;
}

std::vector<std::uint64_t> PartialArena::sys_signature(NodeId s) const {
  std::vector<std::uint64_t> sig;
  sig.reserve(syss_[s].edges.size());
  for (const GroupedEdge& e : syss_[s].edges) sig.push_back(std::uint64_t{find_env(e.target)} << 32 | e.priority);
  std::sort(sig.begin(), sig.end());
  sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
  return sig;
}

std::vector<std::uint64_t> PartialArena::env_signature(NodeId n) const {
  std::vector<std::uint64_t> sig;
  for (const GroupedEdge& c : envs_[n].children) sig.push_back(find_sys(c.target));
  std::sort(sig.begin(), sig.end());
  sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
  return sig;
}

NodeId PartialArena::intern_sys(NodeId parent, std::uint64_t envLetter, std::vector<GroupedEdge> edges) {
  check_budget();
  auto id = static_cast<NodeId>(syss_.size());
  syss_.push_back(SysNode{parent, envLetter, std::move(edges)});
  sysParent_.push_back(id);
  sysWinner_.push_back(-1);
  sysActive_.emplace_back();
  sysPreds_.emplace_back();
  sysSigOf_.emplace_back();
  if (cfg_.merge) {
    auto sig = sys_signature(id);
    if (auto it = sysSig_.find(sig); it != sysSig_.end()) {
      NodeId r = it->second;
      if (find_sys(r) == r && sys_signature(r) == sig) {
        syss_.pop_back();
        sysParent_.pop_back();
        sysWinner_.pop_back();
        sysActive_.pop_back();
        sysPreds_.pop_back();
        sysSigOf_.pop_back();
        return r;
      }
    }
    sysSig_[sig] = id;
    sysSigOf_[id] = std::move(sig);
  }
  for (const GroupedEdge& e : syss_[id].edges) envPreds_[e.target].push_back(id);
  return id;
}

// Re-signs nodes whose successors were merged, merging further as needed.
// Work items are (isSys, node).
void PartialArena::cascade(std::vector<std::pair<bool, NodeId>> work) {
  while (!work.empty()) {
    auto [isSys, x] = work.back();
    work.pop_back();
    if (isSys) {
      if (find_sys(x) != x) continue;
      auto sig = sys_signature(x);
      if (sig == sysSigOf_[x]) continue;
      if (auto it = sysSig_.find(sysSigOf_[x]); it != sysSig_.end() && it->second == x) sysSig_.erase(it);
      auto it = sysSig_.find(sig);
      if (it != sysSig_.end() && it->second != x && find_sys(it->second) == it->second &&
          sys_signature(it->second) == sig) {
        NodeId r = it->second;
        sysParent_[x] = r;
        ++mergedSys_;
        if (sysWinner_[r] < 0) sysWinner_[r] = sysWinner_[x];
        for (NodeId e : sysPreds_[x]) work.emplace_back(false, e);
        sysPreds_[r].insert(sysPreds_[r].end(), sysPreds_[x].begin(), sysPreds_[x].end());
      } else {
        sysSig_[sig] = x;
        sysSigOf_[x] = std::move(sig);
      }
    } else {
      x = find_env(x);
      if (!envs_[x].expanded) continue;
      auto sig = env_signature(x);
      if (sig == envSigOf_[x]) continue;
      if (auto it = envSig_.find(envSigOf_[x]); it != envSig_.end() && it->second == x) envSig_.erase(it);
      auto it = envSig_.find(sig);
      if (it != envSig_.end() && it->second != x && find_env(it->second) == it->second &&
          env_signature(it->second) == sig) {
        NodeId m = it->second;
        envParent_[x] = m;
        ++mergedEnv_;
        if (envWinner_[m] < 0) envWinner_[m] = envWinner_[x];
        for (NodeId s : envPreds_[x]) work.emplace_back(true, s);
        envPreds_[m].insert(envPreds_[m].end(), envPreds_[x].begin(), envPreds_[x].end());
      } else {
        envSig_[sig] = x;
        envSigOf_[x] = std::move(sig);
      }
    }
  }
}

std::vector<NodeId> PartialArena::expand(NodeId n) {
  n = find_env(n);
  if (envs_[n].expanded) return {};
  const StateId q = envs_[n].state;
  const std::size_t nEnv = aut_->partition().num_env();
  const std::size_t nSys = aut_->partition().num_sys();
  std::vector<NodeId> created;
  std::vector<GroupedEdge> children;

  for (std::uint64_t e = 0; e < (std::uint64_t{1} << nEnv); ++e) {
    std::vector<GroupedEdge> edges;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << nSys); ++s) {
      Transition t = aut_->successor(q, e | s << nEnv);
      NodeId target = find_env(env_node_for(t.target, created));
      auto it = std::find_if(edges.begin(), edges.end(), [&](const GroupedEdge& g) {
        return g.target == target && g.priority == t.priority;
      });
      if (it == edges.end()) {
        edges.push_back(GroupedEdge{target, t.priority, 1, s});
      } else {
        ++it->letters;
      }
    }
    std::sort(edges.begin(), edges.end(), [](const GroupedEdge& a, const GroupedEdge& b) {
      return a.target != b.target ? a.target < b.target : a.priority < b.priority;
    });
    NodeId sid = intern_sys(n, e, std::move(edges));
    auto it = std::find_if(children.begin(), children.end(), [&](const GroupedEdge& g) { return g.target == sid; });
    if (it == children.end()) {
      children.push_back(GroupedEdge{sid, 0, 1, e});
    } else {
      ++it->letters;
    }
  }
  std::sort(children.begin(), children.end(),
            [](const GroupedEdge& a, const GroupedEdge& b) { return a.target < b.target; });
  for (const GroupedEdge& c : children) sysPreds_[c.target].push_back(n);
  envs_[n].children = std::move(children);
  envs_[n].expanded = true;
  ++expansions_;
  if (cfg_.merge) cascade({{false, n}});
  return created;
}

std::vector<NodeId> PartialArena::sys_targets(NodeId s) const {
  std::vector<NodeId> out;
  for (const GroupedEdge& e : syss_[find_sys(s)].edges) {
    NodeId t = find_env(e.target);
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  }
  return out;
}

std::vector<NodeId> PartialArena::env_children(NodeId n) const {
  std::vector<NodeId> out;
  for (const GroupedEdge& c : envs_[find_env(n)].children) {
    NodeId t = find_sys(c.target);
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  }
  return out;
}

namespace {
std::optional<Player> winner_of(std::int8_t w) {
  if (w < 0) return std::nullopt;
  return static_cast<Player>(w);
}
}  // namespace

std::optional<Player> PartialArena::decided_env(NodeId n) const { return winner_of(envWinner_[find_env(n)]); }
std::optional<Player> PartialArena::decided_sys(NodeId s) const { return winner_of(sysWinner_[find_sys(s)]); }

void PartialArena::set_decided_env(NodeId n, Player winner) {
  auto& w = envWinner_[find_env(n)];
  if (w >= 0 && w != static_cast<std::int8_t>(winner)) throw std::logic_error("conflicting winners for env node");
  w = static_cast<std::int8_t>(winner);
}

void PartialArena::set_decided_sys(NodeId s, Player winner) {
  auto& w = sysWinner_[find_sys(s)];
  if (w >= 0 && w != static_cast<std::int8_t>(winner)) throw std::logic_error("conflicting winners for sys node");
  w = static_cast<std::int8_t>(winner);
}

void PartialArena::activate_env_choice(NodeId n, std::uint32_t child) {
  auto& v = envActive_[find_env(n)];
  if (std::find(v.begin(), v.end(), child) == v.end()) v.push_back(child);
}

void PartialArena::activate_sys_choice(NodeId s, std::uint32_t edge) {
  auto& v = sysActive_[find_sys(s)];
  if (std::find(v.begin(), v.end(), edge) == v.end()) v.push_back(edge);
}

const std::vector<std::uint32_t>& PartialArena::active_env_choices(NodeId n) const { return envActive_[find_env(n)]; }
const std::vector<std::uint32_t>& PartialArena::active_sys_choices(NodeId s) const { return sysActive_[find_sys(s)]; }

void PartialArena::write_dot(std::ostream& out) const {
  out << "digraph arena {\n  rankdir=LR;\n";
  for (NodeId n = 0; n < envs_.size(); ++n) {
    if (find_env(n) != n) continue;
    out << "  e" << n << " [shape=box,label=\"" << to_string(aut_->master(envs_[n].state)) << "\""
        << (envs_[n].expanded ? "" : ",style=dashed") << "];\n";
    for (NodeId c : env_children(n)) out << "  e" << n << " -> s" << c << ";\n";
  }
  for (NodeId s = 0; s < syss_.size(); ++s) {
    if (find_sys(s) != s) continue;
    out << "  s" << s << " [shape=diamond,label=\"s" << s << "\"];\n";
    for (const GroupedEdge& e : syss_[s].edges)
      out << "  s" << s << " -> e" << find_env(e.target) << " [label=\"" << e.priority << "\"];\n";
  }
  out << "}\n";
}

bool closed(const PartialArena& a, Player perspective) {
  std::vector<char> seenEnv(a.num_env(), 0), seenSys(a.num_sys(), 0);
  std::vector<NodeId> stack{a.initial()};
  while (!stack.empty()) {
    NodeId n = a.find_env(stack.back());
    stack.pop_back();
    if (seenEnv[n]) continue;
    seenEnv[n] = 1;
    if (a.decided_env(n)) continue;
    const EnvNode& en = a.env(n);
    if (!en.expanded) return false;
    std::vector<NodeId> kids;
    if (perspective == Player::Env) {
      const auto& act = a.active_env_choices(n);
      if (act.empty()) return false;
      for (auto i : act) kids.push_back(a.find_sys(en.children[i].target));
    } else {
      kids = a.env_children(n);
    }
    for (NodeId s : kids) {
      if (seenSys[s]) continue;
      seenSys[s] = 1;
      if (a.decided_sys(s)) continue;
      const SysNode& sn = a.sys(s);
      if (perspective == Player::Sys) {
        const auto& act = a.active_sys_choices(s);
        if (act.empty()) return false;
        for (auto i : act) stack.push_back(sn.edges[i].target);
      } else {
        for (const GroupedEdge& e : sn.edges) stack.push_back(e.target);
      }
    }
  }
  return true;
}

void explore_all(PartialArena& a) {
  std::vector<NodeId> stack{a.initial()};
  std::vector<char> seen;
  while (!stack.empty()) {
    NodeId n = a.find_env(stack.back());
    stack.pop_back();
    if (seen.size() < a.num_env()) seen.resize(a.num_env(), 0);
    if (seen[n]) continue;
    seen[n] = 1;
    if (!a.env(n).expanded) {
      a.expand(n);
      n = a.find_env(n);
      if (seen.size() < a.num_env()) seen.resize(a.num_env(), 0);
      seen[n] = 1;
    }
    for (NodeId c : a.env_children(n))
      for (const GroupedEdge& e : a.sys(c).edges) stack.push_back(e.target);
  }
}

}  // namespace semsyn
