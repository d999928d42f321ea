// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "random_formula.hpp"
#include "semsyn/automaton.hpp"
#include "semsyn/errors.hpp"
#include "semsyn/explore.hpp"
#include "semsyn/learn.hpp"
#include "semsyn/parser.hpp"
#include "semsyn/progression.hpp"
#include "semsyn/psolve.hpp"
#include "two_route_game.hpp"

using namespace semsyn;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

std::string fmt(double x, int prec = 3) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(prec) << x;
  return o.str();
}

std::vector<GeneratedInstance> small_instances(std::uint64_t seed, std::size_t n) {
  GenConfig cfg;
  cfg.seed = seed;
  std::vector<GeneratedInstance> out;
  while (out.size() < n) {
    for (auto& g : gen_formulas(cfg, n)) {
      if (!g.large && out.size() < n) out.push_back(std::move(g));
    }
    cfg.seed += 7919;
  }
  return out;
}

// ---------------------------------------------------------------------------

Outcome c1_automaton_conformance() {
  std::mt19937_64 rng(1);
  auto props = semsyn::testing::prop_ids({"a", "b", "c"});
  std::size_t formulas = 0, words = 0, bad = 0;
  std::string firstBad;
  while (formulas < 2000) {
    Formula f = semsyn::testing::random_formula(rng, props, 1 + static_cast<int>(rng() % 12));
    std::unique_ptr<Automaton> aut;
    try {
      aut = std::make_unique<Automaton>(f, Partition(props, {}));
    } catch (const UnsupportedError&) {
      continue;
    }
    ++formulas;
    for (int i = 0; i < 20; ++i) {
      LassoWord w = semsyn::testing::random_lasso(rng, props, 4, 4);
      ++words;
      if (accepts_lasso(*aut, w) != eval_lasso(f, w)) {
        if (!bad++) firstBad = to_string(f);
      }
    }
  }
  std::string d = std::to_string(formulas) + " formulas, " + std::to_string(words) + " lassos, " +
                  std::to_string(bad) + " disagreements";
  if (bad) d += " (first: " + firstBad + ")";
  return {bad == 0, d};
}

Outcome c2_end_to_end(const PairModel* model) {
  if (!model) return {false, "no trained model available"};
  auto shared = std::make_shared<const PairModel>(*model);
  GenConfig cfg;
  cfg.seed = 202;
  std::size_t checked = 0, bad = 0, skipped = 0, runs = 0;
  std::string firstBad;
  while (checked < 200) {
    for (const auto& g : gen_formulas(cfg, 50)) {
      if (checked == 200) break;
      Verdict want;
      try {
        want = solve_full_oracle(g.formula, g.partition);
      } catch (const ResourceError&) {
        ++skipped;
        continue;
      }
      ++checked;
      BaselineHeuristic base;
      ModelHeuristic mod(shared);
      ReverseHeuristic rev;
      for (Heuristic* h : {static_cast<Heuristic*>(&base), static_cast<Heuristic*>(&mod), static_cast<Heuristic*>(&rev)}) {
        ++runs;
        RunStats st = run(g.formula, g.partition, ExploreConfig{}, *h);
        if (st.verdict != want && !bad++) firstBad = g.text + " with " + h->name();
      }
    }
    cfg.seed += 1;
  }
  std::string d = std::to_string(checked) + " instances x 3 heuristics = " + std::to_string(runs) + " runs, " +
                  std::to_string(bad) + " disagreements with the oracle, " + std::to_string(skipped) +
                  " skipped over the arena limit";
  if (bad) d += " (first: " + firstBad + ")";
  return {bad == 0, d};
}

Outcome c3_examples() {
  Letter a, b;
  a.set(intern_prop("a"));
  b.set(intern_prop("b"));
  Formula f = parse_ltl("!a | G F (a & X b)");
  Automaton aut(f, Partition::from_names({"a"}, {"b"}));
  bool ok = aut.master(aut.initial()) == f;
  const auto& atoms = aut.decomposition().atoms;
  std::uint32_t gs = 0;
  while (gs < atoms.size() && atoms[gs].kind != AtomKind::GSuffix) ++gs;
  ok = ok && gs < atoms.size();
  Formula prog0;
  for (auto& [atom, p] : aut.progress(aut.initial()))
    if (atom == gs) prog0 = p;
  ok = ok && prog0 == parse_ltl("a & X b");
  StepEvents e1, e2;
  Transition t1 = aut.step(aut.initial(), a, &e1);
  auto p1 = aut.progress(t1.target);
  ok = ok && aut.master(t1.target) == parse_ltl("G F (a & X b)") && p1.size() == 1 && p1[0].second == parse_ltl("b");
  Transition t2 = aut.step(t1.target, b, &e2);
  ok = ok && aut.master(t2.target) == parse_ltl("G F (a & X b)") && e2.raw.size() == 1 && e2.raw[0].second == tt() &&
       e2.good.size() == 1 && e2.good[0] && t2.priority % 2 == 0;
  BaselineHeuristic h;
  Verdict v = run(parse_ltl("G (r <-> X g)"), Partition::from_names({"r"}, {"g"}), ExploreConfig{}, h).verdict;
  return {ok && v == Verdict::Realizable,
          std::string("label chain ") + (ok ? "reproduced" : "differs") + ", G (r <-> X g) with env r, sys g: " +
              verdict_name(v)};
}

Outcome c4_ground_truth() {
  std::size_t terminal = 0, badTerminal = 0, games = 0;
  double maxAbs = 0.0;
  auto insts = small_instances(404, 60);
  std::vector<std::pair<Formula, Partition>> all;
  for (const auto& g : insts) all.emplace_back(g.formula, g.partition);
  for (const char* t : {"F (a & b)", "G (a -> b) & F !a", "a & b", "G !b & F b"})
    all.emplace_back(parse_ltl(t), Partition::from_names({"a"}, {"b"}));
  for (const auto& [f, p] : all) {
    PartialArena ar(f, p);
    try {
      explore_all(ar);
    } catch (const ResourceError&) {
      continue;
    }
    ++games;
    SolveView v = partial_view(ar, Player::Sys);
    auto gt = gt_exact_edges(v, zielonka(v), 0.9);
    for (std::uint32_t e = 0; e < gt.size(); ++e) {
      maxAbs = std::max(maxAbs, std::abs(gt[e]));
      const ViewNode t = v.origin[v.target[e]];
      if (t.isSys) continue;
      Formula m = ar.automaton().master(ar.env(t.id).state);
      if (m.is_true() || m.is_false()) {
        ++terminal;
        badTerminal += gt[e] != (m.is_true() ? 1.0 : -1.0);
      }
    }
  }
  SolveView two = semsyn::testing::two_route_game(Player::Sys);
  auto gt = gt_exact_edges(two, zielonka(two), 0.9);
  auto edge = [&](std::uint32_t u, std::uint32_t t) {
    for (std::uint32_t e = two.begin[u]; e < two.begin[u + 1]; ++e)
      if (two.target[e] == t) return gt[e];
    return std::nan("");
  };
  const double uv1 = edge(0, 1), uw = edge(0, 3), v1g = edge(1, 4), v2g = edge(2, 4);
  const bool twoOk = uv1 > uw && v1g == v2g && uv1 == 0.9 && uw == 0.9 * 0.9;
  return {badTerminal == 0 && terminal > 0 && maxAbs <= 1.0 && twoOk,
          std::to_string(terminal) + " terminal edges over " + std::to_string(games) + " games, " +
              std::to_string(badTerminal) + " wrong, max |gt| " + fmt(maxAbs) + "; two-route game: u->v1 " + fmt(uv1, 4) +
              " u->w " + fmt(uw, 4) + " v1->goal " + fmt(v1g, 4) + " v2->goal " + fmt(v2g, 4)};
}

Outcome c5_mcts() {
  GenConfig gc;
  gc.seed = 5;
  std::size_t agree = 0, total = 0, games = 0;
  while (games < 100) {
    for (const auto& g : gen_formulas(gc, 50)) {
      if (games == 100) break;
      PartialArena a(g.formula, g.partition);
      try {
        explore_all(a);
      } catch (const ResourceError&) {
        continue;
      }
      SolveView v = partial_view(a, Player::Sys);
      if (v.size() > 200) continue;
      ++games;
      auto ex = gt_exact_edges(v, zielonka(v), 0.9);
      MctsConfig mc;
      mc.iterations = 10'000;
      auto est = gt_mcts_edges(v, mc);
      for (std::size_t e = 0; e < ex.size(); ++e) {
        ++total;
        agree += (ex[e] > 0) == (est[e] > 0);
      }
    }
    gc.seed += 1000;
  }
  const double rate = static_cast<double>(agree) / static_cast<double>(total);
  return {rate >= 0.9, std::to_string(games) + " games, " + std::to_string(total) + " edges, sign agreement " +
                           fmt(rate, 4) + " (threshold 0.90, 10^4 iterations)"};
}

Outcome c6_learning(std::unique_ptr<PairModel>& modelOut) {
  auto t0 = Clock::now();
  // Disjoint train and evaluation corpora.
  auto train = small_instances(6001, 500);
  std::set<std::string> seen;
  for (const auto& g : train) seen.insert(g.text);
  std::vector<GeneratedInstance> test;
  for (const auto& g : small_instances(6002, 140))
    if (!seen.count(g.text) && test.size() < 100) test.push_back(g);
  GtConfig gc;
  auto label = [&](const std::vector<GeneratedInstance>& gs) {
    std::vector<LabeledGame> out;
    for (const auto& g : gs) out.push_back(label_game(g.formula, g.partition, gc, g.text));
    return out;
  };
  auto trainGames = label(train);
  auto testGames = label(test);
  Dataset ds = build_dataset(trainGames, all_feature_specs(), DatasetConfig{});
  GbtParams hp;
  auto specs = rfe(ds, hp, ds.specs, 64);
  PairModel model = train_gbt(ds.project(specs), hp);
  modelOut = std::make_unique<PairModel>(model);

  ModelHeuristic mh(std::make_shared<const PairModel>(model));
  BaselineHeuristic bh;
  RandomHeuristic rh(6);
  auto ms = state_score_eval(mh, testGames);
  auto bs = state_score_eval(bh, testGames);
  auto rs = state_score_eval(rh, testGames);
  bool ok = true;
  std::string d = std::to_string(trainGames.size()) + " train games (" + std::to_string(ds.size()) + " rows, " +
                  std::to_string(specs.size()) + " features), " + std::to_string(testGames.size()) + " test games;";
  for (int c = 0; c < kNumStateClasses; ++c) {
    const bool randOk = std::abs(rs[c].mean - 0.5) <= 0.05;
    const bool baseOk = ms[c].mean >= bs[c].mean + 0.05;
    const bool randMarginOk = ms[c].mean >= rs[c].mean + 0.15;
    ok = ok && randOk && baseOk && randMarginOk && ms[c].states > 0;
    d += " " + StateClass::from_index(c).name() + "[n=" + std::to_string(ms[c].states) + " model " +
         fmt(ms[c].mean) + " baseline " + fmt(bs[c].mean) + " random " + fmt(rs[c].mean) + " checks " +
         (randOk ? "+" : "-") + (baseOk ? "+" : "-") + (randMarginOk ? "+" : "-") + "]";
  }
  d += "; checks are random within 0.5+-0.05, model >= baseline+0.05, model >= random+0.15; " +
       fmt(std::chrono::duration<double>(Clock::now() - t0).count(), 1) + " s";
  return {ok, d};
}

Outcome c7_merging() {
  auto arb = named_instance(PatternPools::defaults(), "arbiter2");
  std::size_t nodes[2];
  Verdict verdicts[2];
  for (int m = 0; m < 2; ++m) {
    ArenaConfig ac;
    ac.merge = m == 1;
    PartialArena a(arb.formula, arb.partition, ac);
    explore_all(a);
    nodes[m] = a.live_env() + a.live_sys();
    OracleConfig oc;
    oc.merge = m == 1;
    verdicts[m] = solve_full_oracle(arb.formula, arb.partition, oc);
  }
  return {nodes[1] < nodes[0] && verdicts[0] == verdicts[1],
          "arbiter2: unmerged " + std::to_string(nodes[0]) + " nodes (" + verdict_name(verdicts[0]) + "), merged " +
              std::to_string(nodes[1]) + " nodes (" + verdict_name(verdicts[1]) + ")"};
}

Outcome c8_determinism() {
  auto call = [](std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::dispatch(args, out, err);
    return std::to_string(code) + "\n" + out.str();
  };
  // solve: counters of the JSON report.
  auto counters = [&](const std::string& heur) {
    auto s = call({"solve", "--ins", "r0,r1", "--outs", "g0,g1", "-f",
                   "G (r0 -> F g0) & G (r1 -> F g1) & G !(g0 & g1)", "--heuristic", heur, "--seed", "3", "--budget",
                   "3", "--json"});
    auto j = nlohmann::json::parse(s.substr(s.find('\n') + 1));
    j.erase("timeMs");
    return j.dump();
  };
  bool solveOk = counters("random") == counters("random") && counters("baseline") == counters("baseline");
  // train: bit-identical model files.
  auto games = std::vector<LabeledGame>{};
  for (const auto& g : small_instances(808, 40)) games.push_back(label_game(g.formula, g.partition, GtConfig{}));
  Dataset ds = build_dataset(games, all_feature_specs(), DatasetConfig{});
  std::ostringstream m1, m2;
  train_gbt(ds, GbtParams{}).save(m1);
  train_gbt(ds, GbtParams{}).save(m2);
  bool trainOk = m1.str() == m2.str() && !m1.str().empty();
  // bench: identical report counters across repeats and thread counts.
  std::vector<std::string> bench = {"bench", "--count", "30", "--seed", "9", "--heuristic", "baseline",
                                    "--heuristic", "random", "--heuristic", "reverse"};
  auto strip_time = [](const std::string& csv) {
    std::istringstream in(csv);
    std::string out, line;
    while (std::getline(in, line)) {
      std::vector<std::string> cols;
      std::stringstream ls(line);
      for (std::string c; std::getline(ls, c, ',');) cols.push_back(c);
      if (cols.size() > 4) cols.erase(cols.begin() + 4);
      for (const auto& c : cols) out += c + ',';
      out += '\n';
    }
    return out;
  };
  auto b1 = bench, b4 = bench;
  b1.insert(b1.end(), {"--jobs", "1"});
  b4.insert(b4.end(), {"--jobs", "4"});
  const std::string r1 = strip_time(call(b1)), r4 = strip_time(call(b4)), r4b = strip_time(call(b4));
  bool benchOk = r1 == r4 && r4 == r4b && r1.size() > 100;
  return {solveOk && trainOk && benchOk, std::string("solve ") + (solveOk ? "identical" : "differs") + ", train " +
                                             (trainOk ? "identical" : "differs") + ", bench " +
                                             (benchOk ? "identical" : "differs")};
}

}  // namespace

int main() {
  std::unique_ptr<PairModel> model;
  std::vector<std::pair<int, Outcome>> results;
  auto guarded = [](const std::function<Outcome()>& fn) {
    try {
      return fn();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("exception: ") + e.what()};
    }
  };
  const std::function<Outcome()> checks[] = {
      c1_automaton_conformance,
      [&] { return c2_end_to_end(model.get()); },
      c3_examples,
      c4_ground_truth,
      c5_mcts,
      [&] { return c6_learning(model); },
      c7_merging,
      c8_determinism,
  };
  // The learning pipeline runs first: its model is one of the heuristics of criterion 2.
  const int order[] = {6, 1, 2, 3, 4, 5, 7, 8};
  std::vector<Outcome> out(9);
  std::vector<double> secs(9);
  for (int k : order) {
    auto t0 = Clock::now();
    out[k] = guarded(checks[k - 1]);
    secs[k] = std::chrono::duration<double>(Clock::now() - t0).count();
  }
  bool all = true;
  for (int k = 1; k <= 8; ++k) {
    std::cout << "criterion " << k << ": " << (out[k].pass ? "PASS" : "FAIL") << "  " << out[k].detail << "  ["
              << fmt(secs[k], 1) << " s]" << std::endl;
    all = all && out[k].pass;
  }
  return all ? 0 : 1;
}
