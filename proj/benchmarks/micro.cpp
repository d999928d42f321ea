#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "semsyn/automaton.hpp"
#include "semsyn/explore.hpp"
#include "semsyn/learn.hpp"
#include "semsyn/parser.hpp"
#include "semsyn/psolve.hpp"

using namespace semsyn;

namespace {

const char* kArbiter = "G (r0 -> F g0) & G (r1 -> F g1) & G !(g0 & g1)";

Partition arbiter_partition() { return Partition::from_names({"r0", "r1"}, {"g0", "g1"}); }

const std::vector<GeneratedInstance>& corpus() {
  static const auto gs = [] {
    GenConfig cfg;
    cfg.seed = 77;
    auto all = gen_formulas(cfg, 40);
    std::erase_if(all, [](const GeneratedInstance& g) { return g.large; });
    return all;
  }();
  return gs;
}

}  // namespace

static void BM_Parse(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(parse_ltl(kArbiter));
}
BENCHMARK(BM_Parse);

static void BM_AutomatonStates(benchmark::State& st) {
  Formula f = parse_ltl(kArbiter);
  for (auto _ : st) benchmark::DoNotOptimize(count_automaton_states(f, arbiter_partition(), 100'000));
}
BENCHMARK(BM_AutomatonStates);

static void BM_FullArena(benchmark::State& st) {
  Formula f = parse_ltl(kArbiter);
  ArenaConfig ac;
  ac.merge = st.range(0) != 0;
  for (auto _ : st) {
    PartialArena a(f, arbiter_partition(), ac);
    explore_all(a);
    benchmark::DoNotOptimize(a.live_env());
  }
}
BENCHMARK(BM_FullArena)->Arg(0)->Arg(1)->ArgNames({"merge"});

static void BM_Zielonka(benchmark::State& st) {
  PartialArena a(parse_ltl(kArbiter), arbiter_partition());
  explore_all(a);
  SolveView v = partial_view(a, Player::Sys);
  for (auto _ : st) benchmark::DoNotOptimize(zielonka(v));
  st.counters["nodes"] = static_cast<double>(v.size());
}
BENCHMARK(BM_Zielonka);

static void BM_GuidedSolveCorpus(benchmark::State& st) {
  const auto& gs = corpus();
  for (auto _ : st) {
    for (const auto& g : gs) {
      BaselineHeuristic h;
      benchmark::DoNotOptimize(run(g.formula, g.partition, ExploreConfig{}, h).verdict);
    }
  }
  st.counters["instances"] = static_cast<double>(gs.size());
}
BENCHMARK(BM_GuidedSolveCorpus)->Unit(benchmark::kMillisecond);

static void BM_OracleCorpus(benchmark::State& st) {
  const auto& gs = corpus();
  for (auto _ : st)
    for (const auto& g : gs) benchmark::DoNotOptimize(solve_full_oracle(g.formula, g.partition));
}
BENCHMARK(BM_OracleCorpus)->Unit(benchmark::kMillisecond);

static void BM_SiblingFeatures(benchmark::State& st) {
  Automaton aut(parse_ltl(kArbiter), arbiter_partition());
  std::vector<EdgeTarget> sibs;
  for (std::uint64_t l = 0; l < aut.num_letters(); ++l) {
    Transition t = aut.successor(aut.initial(), l);
    sibs.push_back({t.target, t.priority});
  }
  const auto specs = all_feature_specs();
  for (auto _ : st) {
    FeatureCache cache;  // cold cache each round
    benchmark::DoNotOptimize(sibling_features(specs, aut, aut.initial(), sibs, &cache));
  }
  st.counters["features"] = static_cast<double>(specs.size());
}
BENCHMARK(BM_SiblingFeatures);

static void BM_RankPairwise(benchmark::State& st) {
  const std::size_t n = static_cast<std::size_t>(st.range(0)), width = 16;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<DatasetRow> rows(400);
  for (auto& r : rows) {
    r.a.resize(width);
    r.b.resize(width);
    for (auto& x : r.a) x = u(rng);
    for (auto& x : r.b) x = u(rng);
    r.label = r.a[0] > r.b[0] ? 1.0 : -1.0;
    r.weight = 1.0;
  }
  auto specs = all_feature_specs();
  specs.resize(width);
  ClassModel m = train_class(rows, specs, GbtParams{});
  std::vector<FeatureVector> cands(n, FeatureVector(width));
  for (auto& c : cands)
    for (auto& x : c) x = u(rng);
  std::vector<std::size_t> base(n);
  std::iota(base.begin(), base.end(), 0);
  for (auto _ : st) benchmark::DoNotOptimize(rank_pairwise(m, cands, base));
}
BENCHMARK(BM_RankPairwise)->Arg(8)->Arg(16)->Arg(20)->Arg(64);

static void BM_TrainGbt(benchmark::State& st) {
  std::vector<LabeledGame> games;
  for (const auto& g : corpus()) games.push_back(label_game(g.formula, g.partition, GtConfig{}));
  Dataset ds = build_dataset(games, all_feature_specs(), DatasetConfig{});
  for (auto _ : st) benchmark::DoNotOptimize(train_gbt(ds, GbtParams{}));
  st.counters["rows"] = static_cast<double>(ds.size());
}
BENCHMARK(BM_TrainGbt)->Unit(benchmark::kMillisecond);

static void BM_Mcts(benchmark::State& st) {
  PartialArena a(parse_ltl(kArbiter), arbiter_partition());
  explore_all(a);
  SolveView v = partial_view(a, Player::Sys);
  MctsConfig cfg;
  cfg.iterations = static_cast<std::size_t>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(gt_mcts_edges(v, cfg));
}
BENCHMARK(BM_Mcts)->Arg(1'000)->Arg(10'000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
