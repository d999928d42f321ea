#include "semsyn/learn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "semsyn/errors.hpp"
#include "semsyn/parser.hpp"

namespace semsyn {

namespace detail {
extern const char* const kDefaultPoolsJson;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> names(char prefix, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

// Replaces {eK}/{sK} by names drawn from a per-template permutation.
std::string instantiate(const std::string& tpl, const std::vector<std::string>& env,
                        const std::vector<std::string>& sys, std::mt19937_64& rng) {
  std::vector<std::string> pe = env, ps = sys;
  std::shuffle(pe.begin(), pe.end(), rng);
  std::shuffle(ps.begin(), ps.end(), rng);
  std::string out;
  for (std::size_t i = 0; i < tpl.size(); ++i) {
    if (tpl[i] == '{') {
      auto close = tpl.find('}', i);
      if (close == std::string::npos || close < i + 3) throw std::invalid_argument("bad template: " + tpl);
      char kind = tpl[i + 1];
      std::size_t k = std::stoul(tpl.substr(i + 2, close - i - 2));
      const auto& pool = kind == 'e' ? pe : ps;
      if ((kind != 'e' && kind != 's') || pool.empty()) throw std::invalid_argument("bad placeholder in " + tpl);
      out += pool[k % pool.size()];
      i = close;
    } else {
      out += tpl[i];
    }
  }
  return out;
}

std::uint64_t view_key(bool isSys, NodeId id) { return (std::uint64_t{isSys} << 32) | id; }

std::vector<std::vector<std::uint32_t>> predecessors(const SolveView& v) {
  std::vector<std::vector<std::uint32_t>> pred(v.size());
  for (std::uint32_t u = 0; u < v.size(); ++u)
    for (std::uint32_t e = v.begin[u]; e < v.begin[u + 1]; ++e) pred[v.target[e]].push_back(u);
  return pred;
}

// Iterative Tarjan over nodes with `in` set and edges accepted by `keep`.
template <class Keep>
std::vector<std::int32_t> scc(const SolveView& v, const std::vector<char>& in, Keep keep) {
  const std::uint32_t n = static_cast<std::uint32_t>(v.size());
  std::vector<std::int32_t> comp(n, -1), index(n, -1), low(n, 0);
  std::vector<char> onStack(n, 0);
  std::vector<std::uint32_t> stack;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> call;  // node, next edge
  std::int32_t counter = 0, comps = 0;
  for (std::uint32_t root = 0; root < n; ++root) {
    if (!in[root] || index[root] >= 0) continue;
    call.push_back({root, v.begin[root]});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    onStack[root] = 1;
    while (!call.empty()) {
      auto& [u, e] = call.back();
      if (e < v.begin[u + 1]) {
        std::uint32_t edge = e++;
        std::uint32_t w = v.target[edge];
        if (!in[w] || !keep(edge)) continue;
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          onStack[w] = 1;
          call.push_back({w, v.begin[w]});
        } else if (onStack[w]) {
          low[u] = std::min(low[u], index[w]);
        }
        continue;
      }
      std::uint32_t done = u;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] == index[done]) {
        while (true) {
          std::uint32_t w = stack.back();
          stack.pop_back();
          onStack[w] = 0;
          comp[w] = comps;
          if (w == done) break;
        }
        ++comps;
      }
    }
  }
  return comp;
}

bool favours(std::uint32_t priority, Player p) { return (priority % 2 == 0) == (p == Player::Sys); }

}  // namespace

// ---------------------------------------------------------------------------
// Generation

PatternPools PatternPools::from_json(const nlohmann::json& j) {
  try {
    PatternPools p;
    p.assumptions = j.at("assumptions").get<std::vector<std::string>>();
    p.guarantees = j.at("guarantees").get<std::vector<std::string>>();
    if (j.contains("instances"))
      for (const auto& [name, inst] : j["instances"].items())
        p.instances[name] = {inst.at("ins").get<std::vector<std::string>>(),
                             inst.at("outs").get<std::vector<std::string>>(), inst.at("formula").get<std::string>()};
    if (p.assumptions.empty() || p.guarantees.empty()) throw std::invalid_argument("pattern pools must be nonempty");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("invalid pattern pools: ") + e.what());
  }
}

PatternPools PatternPools::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open pattern pools " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("invalid pattern pools: ") + e.what());
  }
  return from_json(j);
}

const PatternPools& PatternPools::defaults() {
  static const PatternPools p = from_json(nlohmann::json::parse(detail::kDefaultPoolsJson));
  return p;
}

std::string sample_formula_text(const GenConfig& cfg, std::mt19937_64& rng) {
  auto env = names('e', cfg.envProps), sys = names('s', cfg.sysProps);
  auto side = [&](const std::vector<std::string>& pool) {
    int d = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.maxDisjuncts));
    std::string out;
    for (int i = 0; i < d; ++i) {
      int c = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.maxConjuncts));
      std::string conj;
      for (int k = 0; k < c; ++k) {
        if (k) conj += " & ";
        conj += "(" + instantiate(pool[rng() % pool.size()], env, sys, rng) + ")";
      }
      if (i) out += " | ";
      out += "(" + conj + ")";
    }
    return out;
  };
  std::string a = side(cfg.pools.assumptions);
  std::string g = side(cfg.pools.guarantees);
  return "(" + a + ") -> (" + g + ")";
}

std::size_t count_automaton_states(Formula f, const Partition& p, std::size_t cap) {
  Automaton a(f, p);
  const std::uint64_t letters = std::uint64_t{1} << p.width();
  for (StateId s = 0; s < a.num_states(); ++s) {
    for (std::uint64_t l = 0; l < letters; ++l) {
      a.successor(s, l);
      if (a.num_states() > cap) return cap + 1;
    }
  }
  return a.num_states();
}

std::vector<GeneratedInstance> gen_formulas(const GenConfig& cfg, std::size_t n) {
  if (cfg.pools.assumptions.empty() || cfg.pools.guarantees.empty())
    throw std::invalid_argument("pattern pools must be nonempty");
  if (cfg.envProps < 1 || cfg.sysProps < 1 || cfg.maxDisjuncts < 1 || cfg.maxConjuncts < 1)
    throw std::invalid_argument("generator counts must be positive");
  std::mt19937_64 rng(cfg.seed);
  Partition p = Partition::from_names(names('e', cfg.envProps), names('s', cfg.sysProps));
  std::vector<GeneratedInstance> out;
  while (out.size() < n) {
    bool ok = false;
    for (std::size_t attempt = 0; attempt < cfg.maxAttempts && !ok; ++attempt) {
      std::string text = sample_formula_text(cfg, rng);
      try {
        Formula f = parse_ltl(text);
        decompose(f);
        std::size_t states = count_automaton_states(f, p, cfg.largeThreshold);
        out.push_back({text, f, p, states, states > cfg.maxTrainStates});
        ok = true;
      } catch (const UnsupportedError&) {
      } catch (const ResourceError&) {
      }
    }
    if (!ok) throw std::runtime_error("pattern pools exhausted: no supported formula after rejection sampling");
  }
  return out;
}

GeneratedInstance named_instance(const PatternPools& pools, const std::string& name) {
  auto it = pools.instances.find(name);
  if (it == pools.instances.end()) throw std::invalid_argument("unknown instance " + name);
  GeneratedInstance g;
  g.text = it->second.formula;
  g.formula = parse_ltl(g.text);
  g.partition = Partition::from_names(it->second.ins, it->second.outs);
  g.automatonStates = count_automaton_states(g.formula, g.partition, 1'000'000);
  return g;
}

// ---------------------------------------------------------------------------
// Ground truth

std::vector<double> gt_exact_nodes(const SolveView& v, const Regions& r, double gamma) {
  const std::uint32_t n = static_cast<std::uint32_t>(v.size());
  auto pred = predecessors(v);
  std::vector<std::int64_t> dist(n, -1);
  for (Player p : {Player::Sys, Player::Env}) {
    std::vector<char> in(n, 0);
    for (std::uint32_t u = 0; u < n; ++u) in[u] = r.winner[u] == p;
    // Certainty core: nodes on a cycle inside the region whose minimal
    // priority favours p.
    std::vector<std::uint32_t> favourable;
    for (std::uint32_t u = 0; u < n; ++u)
      for (std::uint32_t e = v.begin[u]; e < v.begin[u + 1]; ++e)
        if (in[u] && in[v.target[e]] && v.priority[e] != kNeutral && favours(v.priority[e], p))
          favourable.push_back(v.priority[e]);
    std::sort(favourable.begin(), favourable.end());
    favourable.erase(std::unique(favourable.begin(), favourable.end()), favourable.end());
    std::vector<char> core(n, 0);
    for (std::uint32_t c : favourable) {
      auto comp = scc(v, in, [&](std::uint32_t e) { return v.priority[e] >= c; });
      std::vector<char> hit;
      for (std::uint32_t u = 0; u < n; ++u)
        for (std::uint32_t e = v.begin[u]; e < v.begin[u + 1]; ++e) {
          std::uint32_t w = v.target[e];
          if (in[u] && in[w] && v.priority[e] == c && comp[u] == comp[w]) {
            if (hit.size() <= static_cast<std::size_t>(comp[u])) hit.resize(comp[u] + 1, 0);
            hit[comp[u]] = 1;
          }
        }
      for (std::uint32_t u = 0; u < n; ++u)
        if (in[u] && comp[u] >= 0 && static_cast<std::size_t>(comp[u]) < hit.size() && hit[comp[u]]) core[u] = 1;
    }
    // Attractor layers towards the core inside the region.
    std::vector<std::uint32_t> pending(n, 0);
    std::vector<std::uint32_t> queue;
    for (std::uint32_t u = 0; u < n; ++u) {
      if (!in[u]) continue;
      pending[u] = v.begin[u + 1] - v.begin[u];
      if (core[u]) {
        dist[u] = 0;
        queue.push_back(u);
      }
    }
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      std::uint32_t u = queue[qi];
      for (std::uint32_t x : pred[u]) {
        if (!in[x] || dist[x] >= 0) continue;
        if (v.owner[x] == p || --pending[x] == 0) {
          dist[x] = dist[u] + 1;
          queue.push_back(x);
        }
      }
    }
    std::int64_t worst = 0;
    for (std::uint32_t u = 0; u < n; ++u)
      if (in[u]) worst = std::max(worst, dist[u]);
    for (std::uint32_t u = 0; u < n; ++u)
      if (in[u] && dist[u] < 0) dist[u] = worst + 1;
  }
  std::int64_t maxd = 0;
  for (auto d : dist) maxd = std::max(maxd, d);
  std::vector<double> pw(static_cast<std::size_t>(maxd) + 1, 1.0);
  for (std::size_t i = 1; i < pw.size(); ++i) pw[i] = pw[i - 1] * gamma;
  std::vector<double> out(n);
  for (std::uint32_t u = 0; u < n; ++u)
    out[u] = (r.winner[u] == Player::Sys ? 1.0 : -1.0) * pw[static_cast<std::size_t>(dist[u])];
  return out;
}

std::vector<double> gt_exact_edges(const SolveView& v, const Regions& r, double gamma) {
  auto node = gt_exact_nodes(v, r, gamma);
  std::vector<double> out(v.target.size());
  for (std::size_t e = 0; e < out.size(); ++e) out[e] = node[v.target[e]];
  return out;
}

std::vector<double> gt_mcts_edges(const SolveView& v, const MctsConfig& cfg, const std::vector<double>& fixedIn,
                                  std::vector<std::uint32_t> roots) {
  const std::uint32_t n = static_cast<std::uint32_t>(v.size());
  std::vector<double> fixed = fixedIn;
  fixed.resize(n, kNaN);
  if (roots.empty())
    for (std::uint32_t u = 0; u < n; ++u)
      if (std::isnan(fixed[u]) && v.begin[u + 1] - v.begin[u] >= 2) roots.push_back(u);
  std::vector<double> Q(v.target.size(), kNaN), V(n, 0.0);
  std::vector<std::uint32_t> ne(v.target.size(), 0), N(n, 0);
  std::vector<std::int64_t> onPath(n, -1);
  std::mt19937_64 rng(cfg.seed);
  if (roots.empty()) roots.push_back(v.initial);

  std::vector<std::uint32_t> path, edges;
  auto is_sys = [&](std::uint32_t u) { return v.owner[u] == Player::Sys; };
  auto ev = [&](std::uint32_t e) {
    std::uint32_t t = v.target[e];
    return std::isnan(fixed[t]) ? Q[e] : fixed[t];
  };
  auto refresh = [&](std::uint32_t u) {
    double best = is_sys(u) ? -2.0 : 2.0;
    bool any = false;
    for (std::uint32_t e = v.begin[u]; e < v.begin[u + 1]; ++e) {
      if (!ne[e]) continue;
      any = true;
      best = is_sys(u) ? std::max(best, ev(e)) : std::min(best, ev(e));
    }
    if (any) V[u] = cfg.gamma * best;
  };

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    std::uint32_t root = roots[it % roots.size()];
    path.assign(1, root);
    edges.clear();
    onPath[root] = 0;
    std::size_t treeEdges = 0;  // edges chosen inside the tree
    bool expanded = false;
    std::int64_t cycleStart = -1;
    // Selection and expansion.
    while (true) {
      std::uint32_t u = path.back();
      if (!std::isnan(fixed[u])) break;
      std::uint32_t b = v.begin[u], end = v.begin[u + 1];
      if (b == end) break;
      std::uint32_t pick = end;
      std::vector<std::uint32_t> fresh;
      for (std::uint32_t e = b; e < end; ++e)
        if (!ne[e]) fresh.push_back(e);
      if (!fresh.empty()) {
        pick = fresh[rng() % fresh.size()];
        expanded = true;
      } else {
        double best = is_sys(u) ? -2.0 : 2.0;
        for (std::uint32_t e = b; e < end; ++e) best = is_sys(u) ? std::max(best, ev(e)) : std::min(best, ev(e));
        const bool critical = path.size() > cfg.criticalDepth;
        double bestScore = -std::numeric_limits<double>::infinity();
        for (std::uint32_t e = b; e < end; ++e) {
          const double q = ev(e);
          if (critical && std::abs(q - best) > cfg.epsilon) continue;
          double bonus = cfg.exploration * std::sqrt(std::log(static_cast<double>(N[u]) + 1.0) / ne[e]);
          double s = (is_sys(u) ? q : -q) + bonus;
          if (s > bestScore) {
            bestScore = s;
            pick = e;
          }
        }
      }
      std::uint32_t t = v.target[pick];
      edges.push_back(pick);
      ++treeEdges;
      if (onPath[t] >= 0) {
        cycleStart = onPath[t];
        break;
      }
      onPath[t] = static_cast<std::int64_t>(path.size());
      path.push_back(t);
      if (expanded) break;
    }
    // Playout: uniform random walk until a pinned node or a repeated node.
    while (cycleStart < 0 && std::isnan(fixed[path.back()])) {
      std::uint32_t u = path.back();
      std::uint32_t deg = v.begin[u + 1] - v.begin[u];
      if (deg == 0) break;
      std::uint32_t e = v.begin[u] + static_cast<std::uint32_t>(rng() % deg);
      std::uint32_t t = v.target[e];
      edges.push_back(e);
      if (onPath[t] >= 0) {
        cycleStart = onPath[t];
        break;
      }
      onPath[t] = static_cast<std::int64_t>(path.size());
      path.push_back(t);
    }
    // Sample values along the path.
    std::vector<double> g(path.size(), 0.0);
    double z = 0.0;
    std::size_t anchor = path.size() - 1;
    if (cycleStart >= 0) {
      std::uint32_t minp = kNeutral;
      for (std::size_t k = static_cast<std::size_t>(cycleStart); k < edges.size(); ++k)
        minp = std::min(minp, v.priority[edges[k]]);
      z = minp == kNeutral ? 0.0 : (minp % 2 == 0 ? 1.0 : -1.0);
      anchor = static_cast<std::size_t>(cycleStart);
    } else if (!std::isnan(fixed[path.back()])) {
      z = fixed[path.back()];
    }
    for (std::size_t i = path.size(); i-- > 0;) g[i] = i >= anchor ? z : cfg.gamma * g[i + 1];
    // Backup along the tree part.
    for (std::size_t k = treeEdges; k-- > 0;) {
      std::uint32_t e = edges[k];
      std::uint32_t u = path[k];
      double val;
      if (k + 1 >= path.size() || (cycleStart >= 0 && k == edges.size() - 1)) {
        // Edge closing the cycle.
        val = ne[e] ? Q[e] + (z - Q[e]) / (ne[e] + 1) : z;
      } else {
        std::uint32_t t = path[k + 1];
        if (!std::isnan(fixed[t])) {
          val = fixed[t];
        } else if (N[t] == 0) {
          V[t] = g[k + 1];
          N[t] = 1;
          val = V[t];
        } else {
          val = V[t];
        }
      }
      Q[e] = std::clamp(val, -1.0, 1.0);
      ++ne[e];
      ++N[u];
      refresh(u);
    }
    for (std::uint32_t u : path) onPath[u] = -1;
  }
  std::vector<double> out(v.target.size(), 0.0);
  for (std::size_t e = 0; e < out.size(); ++e) {
    std::uint32_t t = v.target[e];
    if (ne[e]) {
      out[e] = ev(e);
    } else if (!std::isnan(fixed[t])) {
      out[e] = fixed[t];
    } else if (N[t]) {
      out[e] = V[t];
    }
  }
  return out;
}

LabeledGame label_game(Formula f, const Partition& p, const GtConfig& cfg, std::string text) {
  LabeledGame g;
  g.text = text.empty() ? to_string(f) : std::move(text);
  ArenaConfig ac;
  ac.maxNodes = cfg.maxNodes;
  g.arena = std::make_shared<PartialArena>(f, p, ac);
  PartialArena& a = *g.arena;
  bool exact = true;
  try {
    explore_all(a);
  } catch (const ResourceError&) {
    exact = false;
  }
  SolveView v = partial_view(a, Player::Sys);
  std::unordered_map<std::uint64_t, std::uint32_t> idx;
  for (std::uint32_t u = 0; u < v.size(); ++u) idx[view_key(v.origin[u].isSys, v.origin[u].id)] = u;

  // Score of moving from view node u to arena node (isSys, id) with priority.
  std::vector<double> nodeGt, edgeGt;
  std::optional<Regions> regions;
  if (exact) {
    regions = zielonka(v);
    nodeGt = gt_exact_nodes(v, *regions, cfg.gamma);
    g.tag = "exact";
  } else {
    std::vector<double> fixed(v.size(), kNaN);
    for (std::uint32_t u = 0; u < v.size(); ++u) {
      if (v.origin[u].isSys) continue;
      const EnvNode& en = a.env(v.origin[u].id);
      Formula m = a.automaton().master(en.state);
      if (m.is_true()) {
        fixed[u] = 1.0;
      } else if (m.is_false()) {
        fixed[u] = -1.0;
      } else if (!en.expanded) {
        fixed[u] = 0.0;
      }
    }
    MctsConfig mc = cfg.mcts;
    mc.gamma = cfg.gamma;
    edgeGt = gt_mcts_edges(v, mc, fixed);
    g.tag = "mcts";
  }
  auto score = [&](std::uint32_t u, bool toSys, NodeId id, std::uint32_t priority) {
    std::uint32_t t = idx.at(view_key(toSys, id));
    if (exact) return nodeGt[t];
    for (std::uint32_t e = v.begin[u]; e < v.begin[u + 1]; ++e)
      if (v.target[e] == t && (toSys || v.priority[e] == priority)) return edgeGt[e];
    return 0.0;
  };

  for (std::uint32_t u = 0; u < v.size(); ++u) {
    const ViewNode o = v.origin[u];
    LabeledChoice c;
    c.sysOwned = o.isSys;
    c.node = o.id;
    std::vector<std::uint32_t> ix;
    if (o.isSys) {
      if (a.decided_sys(o.id)) continue;
      sys_choice_candidates(a, o.id, ix, c.cands);
      if (c.cands.size() < 2) continue;
      for (std::size_t k = 0; k < ix.size(); ++k) {
        const GroupedEdge& e = a.sys(o.id).edges[ix[k]];
        c.gt.push_back(score(u, false, a.find_env(e.target), e.priority));
      }
      c.source = a.env(a.sys(o.id).parent).state;
    } else {
      if (!a.env(o.id).expanded) continue;
      env_choice_candidates(a, o.id, ix, c.cands);
      if (c.cands.size() < 2) continue;
      for (std::size_t k = 0; k < ix.size(); ++k)
        c.gt.push_back(score(u, true, a.find_sys(a.env(o.id).children[ix[k]].target), kNeutral));
      c.source = a.env(o.id).state;
    }
    const Player owner = o.isSys ? Player::Sys : Player::Env;
    c.cls = classify_state(a.automaton(), c.source, owner);
    if (regions) c.winner = regions->winner[u];
    g.choices.push_back(std::move(c));
  }
  return g;
}

void write_ground_truth(std::ostream& out, const LabeledGame& g) {
  for (const auto& c : g.choices)
    for (std::size_t k = 0; k < c.cands.size(); ++k) {
      nlohmann::json j = {{"edgeKey", c.cands[k].key},
                          {"score", c.gt[k]},
                          {"tag", g.tag},
                          {"class", c.cls.name()},
                          {"node", c.node},
                          {"owner", c.sysOwned ? "sys" : "env"}};
      out << j.dump() << '\n';
    }
}

// ---------------------------------------------------------------------------
// Datasets

std::size_t Dataset::size() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.size();
  return n;
}

Dataset Dataset::project(const std::vector<FeatureSpec>& keep) const {
  std::vector<std::size_t> col;
  for (const auto& k : keep) {
    auto it = std::find(specs.begin(), specs.end(), k);
    if (it == specs.end()) throw std::invalid_argument("dataset lacks feature " + k.name());
    col.push_back(static_cast<std::size_t>(it - specs.begin()));
  }
  Dataset out;
  out.specs = keep;
  for (int c = 0; c < kNumStateClasses; ++c) {
    out.rows[c].reserve(rows[c].size());
    for (const auto& r : rows[c]) {
      DatasetRow p;
      p.label = r.label;
      p.weight = r.weight;
      p.meta = r.meta;
      for (auto j : col) {
        p.a.push_back(r.a[j]);
        p.b.push_back(r.b[j]);
      }
      out.rows[c].push_back(std::move(p));
    }
  }
  return out;
}

void Dataset::write_jsonl(std::ostream& out) const {
  nlohmann::json head;
  head["specs"] = nlohmann::json::array();
  for (const auto& s : specs) head["specs"].push_back(s.name());
  out << head.dump() << '\n';
  for (int c = 0; c < kNumStateClasses; ++c)
    for (const auto& r : rows[c]) {
      FeatureVector d(r.a.size());
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = r.a[i] - r.b[i];
      nlohmann::json j = {{"class", StateClass::from_index(c).name()},
                          {"featsA", r.a},
                          {"featsB", r.b},
                          {"diffs", d},
                          {"label", r.label},
                          {"weight", r.weight},
                          {"meta", r.meta}};
      out << j.dump() << '\n';
    }
}

Dataset Dataset::read_jsonl(std::istream& in) {
  Dataset ds;
  std::string line;
  try {
    if (!std::getline(in, line)) throw std::invalid_argument("empty dataset");
    const auto head = nlohmann::json::parse(line);
    for (const auto& s : head.at("specs")) ds.specs.push_back(FeatureSpec::parse(s.get<std::string>()));
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto j = nlohmann::json::parse(line);
      auto cls = StateClass::parse(j.at("class").get<std::string>());
      if (!cls) throw std::invalid_argument("unknown class in dataset");
      DatasetRow r;
      r.a = j.at("featsA").get<FeatureVector>();
      r.b = j.at("featsB").get<FeatureVector>();
      r.label = j.at("label").get<double>();
      r.weight = j.at("weight").get<double>();
      if (j.contains("meta")) r.meta = j["meta"];
      if (r.a.size() != ds.specs.size() || r.b.size() != ds.specs.size())
        throw std::invalid_argument("dataset row width does not match its specs");
      ds.rows[cls->index()].push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("invalid dataset: ") + e.what());
  }
  return ds;
}

Dataset build_dataset(const std::vector<LabeledGame>& games, const std::vector<FeatureSpec>& specs,
                      const DatasetConfig& cfg) {
  Dataset ds;
  ds.specs = specs;
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t gi = 0; gi < games.size(); ++gi) {
    const LabeledGame& g = games[gi];
    FeatureCache cache;
    for (const auto& c : g.choices) {
      std::vector<EdgeTarget> targets;
      for (const auto& cd : c.cands) targets.push_back({cd.target, cd.priority});
      std::vector<FeatureVector> feats;
      for (std::size_t i = 0; i < c.cands.size(); ++i)
        for (std::size_t j = i + 1; j < c.cands.size(); ++j) {
          if (c.gt[i] == c.gt[j]) continue;
          if (feats.empty()) feats = sibling_features(specs, g.arena->automaton(), c.source, targets, &cache);
          std::size_t x = i, y = j;
          if (rng() & 1U) std::swap(x, y);
          DatasetRow r;
          r.a = feats[x];
          r.b = feats[y];
          // +1 when A is the better move for the owner of the choice.
          r.label = (c.gt[x] > c.gt[y]) == c.sysOwned ? 1.0 : -1.0;
          r.weight = std::abs(c.gt[x] - c.gt[y]);
          r.meta = {{"game", gi}, {"node", c.node}, {"edges", {c.cands[x].key, c.cands[y].key}}};
          ds.rows[c.cls.index()].push_back(std::move(r));
        }
    }
  }
  for (auto& rows : ds.rows) {
    if (rows.size() <= cfg.capPerClass) continue;
    std::vector<std::size_t> pick(rows.size());
    std::iota(pick.begin(), pick.end(), 0);
    std::shuffle(pick.begin(), pick.end(), rng);
    pick.resize(cfg.capPerClass);
    std::sort(pick.begin(), pick.end());
    std::vector<DatasetRow> kept;
    kept.reserve(pick.size());
    for (auto i : pick) kept.push_back(std::move(rows[i]));
    rows = std::move(kept);
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Training

ClassModel train_class(const std::vector<DatasetRow>& rows, const std::vector<FeatureSpec>& specs,
                       const GbtParams& hp, std::vector<double>* importance, std::string* warning) {
  const std::size_t m = specs.size(), width = 3 * m, n = rows.size();
  ClassModel model;
  model.specs = specs;
  if (importance) importance->assign(width, 0.0);
  if (n == 0) return model;

  std::vector<std::vector<double>> col(width, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      col[j][i] = rows[i].a[j];
      col[m + j][i] = rows[i].b[j];
      col[2 * m + j][i] = rows[i].a[j] - rows[i].b[j];
    }
  std::vector<double> y(n), w(n);
  double sw = 0.0, swp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = rows[i].label > 0 ? 1.0 : 0.0;
    w[i] = rows[i].weight > 0 ? rows[i].weight : 1.0;
    sw += w[i];
    swp += w[i] * y[i];
  }
  double prior = std::clamp(swp / sw, 1e-6, 1.0 - 1e-6);
  model.baseScore = std::log(prior / (1.0 - prior));
  if (swp == 0.0 || swp == sw) {
    if (warning) *warning = "single label: constant model";
    return model;
  }

  std::vector<std::vector<std::uint32_t>> sorted(width, std::vector<std::uint32_t>(n));
  for (std::size_t c = 0; c < width; ++c) {
    std::iota(sorted[c].begin(), sorted[c].end(), 0U);
    std::stable_sort(sorted[c].begin(), sorted[c].end(),
                     [&](std::uint32_t a, std::uint32_t b) { return col[c][a] < col[c][b]; });
  }

  std::vector<double> F(n, model.baseScore), g(n), h(n);
  struct GrowNode {
    double G = 0, H = 0;
    std::size_t count = 0;
    bool split = false;
    std::uint32_t feature = 0;
    double threshold = 0;
    std::int32_t left = -1, right = -1;
  };
  for (int t = 0; t < hp.trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      double p = 1.0 / (1.0 + std::exp(-F[i]));
      g[i] = w[i] * (p - y[i]);
      h[i] = std::max(w[i] * p * (1.0 - p), 1e-12);
    }
    std::vector<GrowNode> nodes(1);
    std::vector<std::int32_t> at(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      nodes[0].G += g[i];
      nodes[0].H += h[i];
    }
    nodes[0].count = n;
    std::vector<std::int32_t> level{0};
    for (int d = 0; d < hp.depth && !level.empty(); ++d) {
      struct Best {
        double gain = 1e-12;
        std::uint32_t feature = 0;
        double threshold = 0;
        bool found = false;
      };
      std::vector<Best> best(nodes.size());
      std::vector<double> GL(nodes.size()), HL(nodes.size()), last(nodes.size());
      std::vector<std::size_t> CL(nodes.size());
      std::vector<char> active(nodes.size(), 0);
      for (auto k : level) active[k] = 1;
      for (std::size_t c = 0; c < width; ++c) {
        std::fill(GL.begin(), GL.end(), 0.0);
        std::fill(HL.begin(), HL.end(), 0.0);
        std::fill(CL.begin(), CL.end(), 0);
        for (std::uint32_t i : sorted[c]) {
          std::int32_t k = at[i];
          if (k < 0 || !active[k]) continue;
          const GrowNode& nd = nodes[k];
          double x = col[c][i];
          if (CL[k] > 0 && x > last[k] && CL[k] >= hp.minLeaf && nd.count - CL[k] >= hp.minLeaf) {
            double GR = nd.G - GL[k], HR = nd.H - HL[k];
            double gain = GL[k] * GL[k] / (HL[k] + hp.lambda) + GR * GR / (HR + hp.lambda) -
                          nd.G * nd.G / (nd.H + hp.lambda);
            if (gain > best[k].gain) {
              double thr = last[k] + (x - last[k]) / 2.0;
              if (thr >= x) thr = last[k];
              best[k] = {gain, static_cast<std::uint32_t>(c), thr, true};
            }
          }
          GL[k] += g[i];
          HL[k] += h[i];
          ++CL[k];
          last[k] = x;
        }
      }
      std::vector<std::int32_t> next;
      for (auto k : level) {
        if (!best[k].found) continue;
        nodes[k].split = true;
        nodes[k].feature = best[k].feature;
        nodes[k].threshold = best[k].threshold;
        nodes[k].left = static_cast<std::int32_t>(nodes.size());
        nodes[k].right = static_cast<std::int32_t>(nodes.size() + 1);
        nodes.emplace_back();
        nodes.emplace_back();
        next.push_back(nodes[k].left);
        next.push_back(nodes[k].right);
        if (importance) (*importance)[best[k].feature] += best[k].gain;
      }
      for (std::size_t i = 0; i < n; ++i) {
        std::int32_t k = at[i];
        if (!nodes[k].split) continue;
        std::int32_t ch = col[nodes[k].feature][i] <= nodes[k].threshold ? nodes[k].left : nodes[k].right;
        at[i] = ch;
        nodes[ch].G += g[i];
        nodes[ch].H += h[i];
        ++nodes[ch].count;
      }
      level = std::move(next);
    }
    // Convert to the split/leaf encoding.
    Tree tree;
    std::vector<std::int32_t> ref(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (nodes[k].split) {
        ref[k] = static_cast<std::int32_t>(tree.splits.size());
        tree.splits.push_back({nodes[k].feature, nodes[k].threshold, 0, 0});
      } else {
        ref[k] = -static_cast<std::int32_t>(tree.leaves.size()) - 1;
        tree.leaves.push_back(-hp.learningRate * nodes[k].G / (nodes[k].H + hp.lambda));
      }
    }
    for (std::size_t k = 0; k < nodes.size(); ++k)
      if (nodes[k].split) {
        auto& s = tree.splits[static_cast<std::size_t>(ref[k])];
        s.left = ref[nodes[k].left];
        s.right = ref[nodes[k].right];
      }
    for (std::size_t i = 0; i < n; ++i) F[i] += tree.leaves[static_cast<std::size_t>(-ref[at[i]] - 1)];
    model.trees.push_back(std::move(tree));
  }
  return model;
}

PairModel train_gbt(const Dataset& ds, const GbtParams& hp, std::vector<std::string>* warnings) {
  PairModel pm;
  nlohmann::json rowsMeta = nlohmann::json::object();
  for (int c = 0; c < kNumStateClasses; ++c) {
    const auto& rows = ds.rows[c];
    rowsMeta[StateClass::from_index(c).name()] = rows.size();
    if (rows.size() < 2) continue;
    std::string warn;
    pm.classes[c] = train_class(rows, ds.specs, hp, nullptr, &warn);
    if (!warn.empty() && warnings) warnings->push_back(StateClass::from_index(c).name() + ": " + warn);
  }
  pm.trainingMeta = {{"trees", hp.trees},
                     {"depth", hp.depth},
                     {"learningRate", hp.learningRate},
                     {"minLeaf", hp.minLeaf},
                     {"lambda", hp.lambda},
                     {"rows", rowsMeta}};
  return pm;
}

std::vector<FeatureSpec> rfe(const Dataset& ds, const GbtParams& hp, const std::vector<FeatureSpec>& startSpecs,
                             std::size_t targetCount) {
  std::vector<FeatureSpec> cur = startSpecs;
  while (cur.size() > targetCount) {
    Dataset sub = ds.project(cur);
    const std::size_t m = cur.size();
    std::vector<double> score(m, 0.0);
    for (int c = 0; c < kNumStateClasses; ++c) {
      if (sub.rows[c].size() < 2) continue;
      std::vector<double> imp;
      train_class(sub.rows[c], cur, hp, &imp);
      for (std::size_t j = 0; j < m; ++j) score[j] += std::max({imp[j], imp[m + j], imp[2 * m + j]});
    }
    std::size_t drop = std::min(std::max<std::size_t>(1, m / 10), m - targetCount);
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    // Lowest importance first; among equals the later spec goes first.
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      if (score[x] != score[y]) return score[x] < score[y];
      return x > y;
    });
    std::vector<char> gone(m, 0);
    for (std::size_t i = 0; i < drop; ++i) gone[order[i]] = 1;
    std::vector<FeatureSpec> next;
    for (std::size_t j = 0; j < m; ++j)
      if (!gone[j]) next.push_back(cur[j]);
    cur = std::move(next);
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Evaluation

std::array<ClassScore, kNumStateClasses> state_score_eval(Heuristic& h, const std::vector<LabeledGame>& games) {
  std::array<double, kNumStateClasses> sum{};
  std::array<ClassScore, kNumStateClasses> out{};
  for (const auto& g : games)
    for (const auto& c : g.choices) {
      const Player owner = c.sysOwned ? Player::Sys : Player::Env;
      double hi = *std::max_element(c.gt.begin(), c.gt.end());
      double lo = *std::min_element(c.gt.begin(), c.gt.end());
      if (hi == lo) continue;
      Player winner = c.winner ? *c.winner : (owner == Player::Sys ? (hi > 0 ? Player::Sys : Player::Env)
                                                                   : (lo < 0 ? Player::Env : Player::Sys));
      if (winner != owner) continue;
      double ext = owner == Player::Sys ? hi : lo;
      if (ext == 0.0) continue;
      auto order = h.rank(Choice{&g.arena->automaton(), c.source, owner}, c.cands);
      sum[c.cls.index()] += c.gt[order[0]] / ext;
      ++out[c.cls.index()].states;
    }
  for (int c = 0; c < kNumStateClasses; ++c)
    if (out[c].states) out[c].mean = sum[c] / static_cast<double>(out[c].states);
  return out;
}

}  // namespace semsyn
