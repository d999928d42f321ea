#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "semsyn/automaton.hpp"
#include "semsyn/errors.hpp"
#include "semsyn/learn.hpp"
#include "semsyn/parser.hpp"
#include "semsyn/psolve.hpp"

namespace semsyn::cli {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<std::string> names_of(const std::vector<PropId>& ids) {
  std::vector<std::string> out;
  for (PropId p : ids) out.push_back(prop_name(p));
  return out;
}

// "-f=<formula>" reaches us with the '=' still attached.
std::string strip_eq(std::string s) {
  if (!s.empty() && s.front() == '=') s.erase(0, 1);
  return s;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return in;
}

// Writes to the named file, or to `fallback` when the name is empty or "-".
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      os_ = &fallback;
    } else {
      file_.open(path);
      if (!file_) throw std::invalid_argument("cannot write " + path);
      os_ = &file_;
    }
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

struct Input {
  std::string formula, ins, outs, tlsf;
  bool realizability = false;

  void add(CLI::App* app) {
    app->add_option("-f,--formula", formula, "LTL formula");
    app->add_option("--ins", ins, "comma-separated environment propositions");
    app->add_option("--outs", outs, "comma-separated system propositions");
    app->add_flag("--realizability", realizability, "accepted for compatibility; realizability is the only mode");
    app->add_option("--tlsf", tlsf, "not supported; convert TLSF to explicit input first");
  }

  // Parses and checks the fragment before the partition, so an unsupported
  // subformula is reported even when it mentions undeclared propositions.
  std::pair<Formula, Partition> load() const {
    if (!tlsf.empty())
      throw std::invalid_argument("TLSF input is not supported; convert it to --ins/--outs/-f with an external tool");
    if (formula.empty()) throw std::invalid_argument("missing -f/--formula");
    Formula f = parse_ltl(strip_eq(formula));
    decompose(f);
    Partition p = Partition::from_names(split_names(strip_eq(ins)), split_names(strip_eq(outs)));
    p.check_covers(f);
    return {f, p};
  }
};

struct GenOptions {
  std::size_t count = 10;
  std::uint64_t seed = 1;
  std::string pools;
  int envProps = 2, sysProps = 2;
  std::size_t maxTrainStates = 500, largeThreshold = 20'000;

  void add(CLI::App* app) {
    app->add_option("--count", count, "number of formulas to generate");
    app->add_option("--seed", seed, "generator seed");
    app->add_option("--pools", pools, "pattern pool JSON file (default: built-in pools)");
    app->add_option("--env-props", envProps, "environment propositions per formula");
    app->add_option("--sys-props", sysProps, "system propositions per formula");
    app->add_option("--max-train-states", maxTrainStates, "larger automata are marked large");
    app->add_option("--large-threshold", largeThreshold, "state count past which construction is abandoned");
  }

  GenConfig config() const {
    GenConfig c;
    if (!pools.empty()) c.pools = PatternPools::load_file(pools);
    c.seed = seed;
    c.envProps = envProps;
    c.sysProps = sysProps;
    c.maxTrainStates = maxTrainStates;
    c.largeThreshold = largeThreshold;
    return c;
  }
};

Instance to_instance(const GeneratedInstance& g, std::string name) {
  return {std::move(name), g.text, names_of(g.partition.env()), names_of(g.partition.sys()), g.automatonStates,
          g.large};
}

// Instances from --input, or freshly generated ones.
struct InstanceSource {
  std::string input;
  GenOptions gen;
  bool includeLarge = false;

  void add(CLI::App* app) {
    app->add_option("-i,--input", input, "instance JSONL file (default: generate)");
    gen.add(app);
    app->add_flag("--include-large", includeLarge, "keep instances marked large");
  }

  std::vector<Instance> load() const {
    std::vector<Instance> all;
    if (!input.empty()) {
      auto in = open_in(input);
      all = read_instances(in);
    } else {
      auto gs = gen_formulas(gen.config(), gen.count);
      for (std::size_t i = 0; i < gs.size(); ++i) all.push_back(to_instance(gs[i], "gen" + std::to_string(i)));
    }
    if (!includeLarge) std::erase_if(all, [](const Instance& x) { return x.large; });
    return all;
  }
};

// Runs fn(i) for i in [0, n) on `jobs` threads; results are stored by index.
template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn fn) {
  jobs = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < jobs; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct GtOptions {
  double gamma = 0.9;
  std::size_t maxNodes = 200'000;
  std::size_t iterations = 10'000;
  double epsilon = 0.1;
  std::size_t criticalDepth = 8;
  double exploration = MctsConfig{}.exploration;
  std::uint64_t seed = 1;
  unsigned jobs = 1;

  void add(CLI::App* app) {
    app->add_option("--gamma", gamma, "decay per step");
    app->add_option("--gt-max-nodes", maxNodes, "arena size for exact labels before falling back to MCTS");
    app->add_option("--mcts-iterations", iterations, "MCTS iterations per game");
    app->add_option("--mcts-epsilon", epsilon, "critical-path window");
    app->add_option("--mcts-depth", criticalDepth, "depth past which only near-best children are followed");
    app->add_option("--mcts-exploration", exploration, "UCT exploration constant");
    app->add_option("--mcts-seed", seed, "MCTS seed");
    app->add_option("-j,--jobs", jobs, "worker threads for labelling");
  }

  GtConfig config() const {
    GtConfig c;
    c.gamma = gamma;
    c.maxNodes = maxNodes;
    c.mcts.gamma = gamma;
    c.mcts.iterations = iterations;
    c.mcts.epsilon = epsilon;
    c.mcts.criticalDepth = criticalDepth;
    c.mcts.exploration = exploration;
    c.mcts.seed = seed;
    return c;
  }
};

std::vector<LabeledGame> label_all(const std::vector<Instance>& insts, const GtOptions& o) {
  std::vector<LabeledGame> games(insts.size());
  const GtConfig cfg = o.config();
  parallel_for(insts.size(), o.jobs, [&](std::size_t i) {
    const Instance& x = insts[i];
    games[i] = label_game(parse_ltl(x.formula), Partition::from_names(x.ins, x.outs), cfg, x.formula);
  });
  return games;
}

struct GbtOptions {
  GbtParams hp;
  void add(CLI::App* app) {
    app->add_option("--trees", hp.trees, "boosting rounds");
    app->add_option("--depth", hp.depth, "tree depth");
    app->add_option("--learning-rate", hp.learningRate, "shrinkage");
    app->add_option("--min-leaf", hp.minLeaf, "minimum rows per leaf");
    app->add_option("--lambda", hp.lambda, "L2 regularization of leaf values");
  }
};

std::vector<FeatureSpec> read_specs(const std::string& path) {
  auto in = open_in(path);
  std::vector<FeatureSpec> out;
  for (std::string line; std::getline(in, line);) {
    line.erase(0, line.find_first_not_of(" \t"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    if (line.empty() || line[0] == '#') continue;
    out.push_back(FeatureSpec::parse(line));
  }
  return out;
}

Dataset read_dataset(const std::string& path) {
  auto in = open_in(path);
  return Dataset::read_jsonl(in);
}

nlohmann::json report_json(const RunReport& r) {
  nlohmann::json j = {{"verdict", verdict_name(r.stats.verdict)},
                      {"timeMs", r.timeMs},
                      {"envNodes", r.stats.envNodes},
                      {"sysNodes", r.stats.sysNodes},
                      {"solves", r.stats.solves},
                      {"backtracks", r.stats.backtracks},
                      {"heuristic", r.heuristic},
                      {"seed", r.seed}};
  if (!r.stats.error.empty()) j["error"] = r.stats.error;
  return j;
}

struct SolveOptions {
  std::string heuristic = "baseline";
  std::uint64_t seed = 1;
  std::size_t budget = ExploreConfig{}.perStintNodeBudget;
  std::size_t maxNodes = ExploreConfig{}.maxTotalNodes;
  bool noMerge = false;

  void add(CLI::App* app) {
    app->add_option("--heuristic", heuristic, "baseline, reverse, random or model:<path>");
    app->add_option("--seed", seed, "seed for randomized heuristics");
    app->add_option("--budget", budget, "node expansions per exploration stint");
    app->add_option("--max-nodes", maxNodes, "arena node limit");
    app->add_flag("--no-merge", noMerge, "disable merging of equivalent arena nodes");
  }

  ExploreConfig config() const {
    ExploreConfig c;
    c.perStintNodeBudget = std::max<std::size_t>(budget, 1);
    c.maxTotalNodes = maxNodes;
    c.merge = !noMerge;
    return c;
  }
};

RunReport solve_one(Formula f, const Partition& p, const SolveOptions& o, Heuristic& h, std::ostream* trace) {
  ExploreConfig cfg = o.config();
  cfg.trace = trace;
  RunReport r;
  r.heuristic = o.heuristic;
  r.seed = o.seed;
  auto t0 = Clock::now();
  r.stats = run(f, p, cfg, h);
  r.timeMs = ms_since(t0);
  return r;
}

int print_class_scores(std::ostream& out, const std::array<ClassScore, kNumStateClasses>& s, bool json) {
  if (json) {
    nlohmann::json j = nlohmann::json::object();
    for (int c = 0; c < kNumStateClasses; ++c)
      j[StateClass::from_index(c).name()] = {{"mean", s[c].mean}, {"states", s[c].states}};
    out << j.dump() << '\n';
  } else {
    out << "class  states  mean\n";
    for (int c = 0; c < kNumStateClasses; ++c)
      out << std::left << std::setw(7) << StateClass::from_index(c).name() << std::setw(8) << s[c].states
          << std::fixed << std::setprecision(4) << s[c].mean << '\n';
  }
  return kOk;
}

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  for (const auto& x : split_names(csv)) out.push_back(std::stod(x));
  return out;
}

}  // namespace

std::vector<Instance> read_instances(std::istream& in) {
  std::vector<Instance> out;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      Instance x;
      x.formula = j.at("formula").get<std::string>();
      x.ins = j.at("ins").get<std::vector<std::string>>();
      x.outs = j.at("outs").get<std::vector<std::string>>();
      x.name = j.value("name", "line" + std::to_string(lineNo));
      x.automatonStates = j.value("automatonStates", std::size_t{0});
      x.large = j.value("large", false);
      out.push_back(std::move(x));
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("instance line " + std::to_string(lineNo) + ": " + e.what());
    }
  }
  return out;
}

void write_instance(std::ostream& out, const Instance& x) {
  nlohmann::json j = {{"name", x.name},           {"formula", x.formula}, {"ins", x.ins}, {"outs", x.outs},
                      {"automatonStates", x.automatonStates}, {"large", x.large}};
  out << j.dump() << '\n';
}

std::unique_ptr<Heuristic> make_heuristic(const std::string& spec, std::uint64_t seed) {
  if (spec == "baseline") return std::make_unique<BaselineHeuristic>();
  if (spec == "reverse") return std::make_unique<ReverseHeuristic>();
  if (spec == "random") return std::make_unique<RandomHeuristic>(seed);
  if (spec.rfind("model:", 0) == 0)
    return std::make_unique<ModelHeuristic>(std::make_shared<const PairModel>(PairModel::load_file(spec.substr(6))));
  throw std::invalid_argument("unknown heuristic " + spec + " (baseline, reverse, random, model:<path>)");
}

double geomean_ratio(const std::vector<RunReport>& reference, const std::vector<RunReport>& candidate,
                     double cutoffMs, std::size_t* count) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < std::min(reference.size(), candidate.size()); ++i) {
    const RunReport& a = reference[i];
    const RunReport& b = candidate[i];
    if (a.stats.verdict == Verdict::Unknown || b.stats.verdict == Verdict::Unknown) continue;
    if (std::max(a.timeMs, b.timeMs) < cutoffMs) continue;
    sum += std::log(std::max(a.timeMs, 0.01) / std::max(b.timeMs, 0.01));
    ++n;
  }
  if (count) *count = n;
  return n ? std::exp(sum / static_cast<double>(n)) : std::nan("");
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"On-the-fly LTL realizability checking with learned exploration guidance", "semsyn"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  // solve / oracle
  Input in;
  SolveOptions so;
  bool json = false;
  std::string tracePath;
  auto* solve = app.add_subcommand("solve", "decide realizability by guided partial exploration");
  in.add(solve);
  so.add(solve);
  solve->add_flag("--json", json, "print a JSON report instead of the verdict token");
  solve->add_option("--trace", tracePath, "write one line per expansion, solve and backtrack to this file");

  Input oin;
  std::size_t oracleMax = OracleConfig{}.maxNodes;
  auto* oracle = app.add_subcommand("oracle", "decide realizability on the fully constructed arena");
  oin.add(oracle);
  oracle->add_option("--max-nodes", oracleMax, "arena node limit");

  // gen
  GenOptions go;
  std::string genOut, named;
  auto* gen = app.add_subcommand("gen", "generate formulas of the form (DNF) -> (DNF) as instance JSONL");
  go.add(gen);
  gen->add_option("-o,--output", genOut, "output file (default stdout)");
  gen->add_option("--named", named, "emit a named instance from the pools instead");

  // gt
  Input gin;
  InstanceSource gsrc;
  GtOptions gto;
  std::string gtOut;
  auto* gt = app.add_subcommand("gt", "edge ground truth as JSONL");
  gin.add(gt);
  gt->add_option("-i,--input", gsrc.input, "instance JSONL file");
  gto.add(gt);
  gt->add_option("-o,--output", gtOut, "output file (default stdout)");

  // dataset
  InstanceSource dsrc;
  GtOptions dgt;
  DatasetConfig dcfg;
  std::string dsOut, dsSpecs;
  auto* dataset = app.add_subcommand("dataset", "label games and write the pairwise training set");
  dsrc.add(dataset);
  dgt.add(dataset);
  dataset->add_option("--cap", dcfg.capPerClass, "rows per state class");
  dataset->add_option("--dataset-seed", dcfg.seed, "seed for pair orientation and subsampling");
  dataset->add_option("--specs", dsSpecs, "feature list file (default: every feature)");
  dataset->add_option("-o,--output", dsOut, "output file (default stdout)")->required();

  // train
  std::string trData, trSpecs, trOut;
  GbtOptions tro;
  auto* train = app.add_subcommand("train", "train the four pairwise ranking models");
  train->add_option("-d,--dataset", trData, "dataset JSONL")->required();
  train->add_option("--specs", trSpecs, "restrict to this feature list");
  tro.add(train);
  train->add_option("-o,--output", trOut, "model JSON file")->required();

  // rfe
  std::string rfData, rfOut;
  std::size_t rfTarget = 64;
  GbtOptions rfo;
  auto* rfeCmd = app.add_subcommand("rfe", "recursive feature elimination");
  rfeCmd->add_option("-d,--dataset", rfData, "dataset JSONL")->required();
  rfeCmd->add_option("--target", rfTarget, "number of features to keep");
  rfo.add(rfeCmd);
  rfeCmd->add_option("-o,--output", rfOut, "feature list file (default stdout)");

  // eval
  InstanceSource esrc;
  GtOptions egt;
  std::string evHeur = "baseline";
  std::uint64_t evSeed = 1;
  bool evJson = false;
  auto* eval = app.add_subcommand("eval", "state-wise score of a heuristic's top choices");
  esrc.add(eval);
  egt.add(eval);
  eval->add_option("--heuristic", evHeur, "baseline, reverse, random or model:<path>");
  eval->add_option("--heuristic-seed", evSeed, "seed for the random heuristic");
  eval->add_flag("--json", evJson, "JSON output");

  // bench
  InstanceSource bsrc;
  SolveOptions bso;
  std::vector<std::string> heuristics;
  unsigned jobs = 1;
  std::string cutoffs = "0,5,30,300", cutoffUnit = "s", csvPath;
  auto* bench = app.add_subcommand("bench", "run many solves and compare heuristics");
  bsrc.add(bench);
  bench->add_option("--heuristic", heuristics, "heuristic to run (repeatable; the first is the reference)");
  bench->add_option("--solve-seed", bso.seed, "seed for randomized heuristics");
  bench->add_option("--budget", bso.budget, "node expansions per exploration stint");
  bench->add_option("--max-nodes", bso.maxNodes, "arena node limit");
  bench->add_option("-j,--jobs", jobs, "worker threads");
  bench->add_option("--cutoffs", cutoffs, "lower cutoffs for the ratio table");
  bench->add_option("--cutoff-unit", cutoffUnit, "s or ms")->check(CLI::IsMember({"s", "ms"}));
  bench->add_option("--csv", csvPath, "per-instance CSV file (default stdout, table then goes to stderr)");

  std::vector<std::string> argv = args;
  std::reverse(argv.begin(), argv.end());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (*solve) {
      auto [f, p] = in.load();
      auto h = make_heuristic(so.heuristic, so.seed);
      std::ofstream traceFile;
      if (!tracePath.empty()) {
        traceFile.open(tracePath);
        if (!traceFile) throw std::invalid_argument("cannot write " + tracePath);
      }
      RunReport r = solve_one(f, p, so, *h, tracePath.empty() ? nullptr : &traceFile);
      if (json)
        out << report_json(r).dump() << '\n';
      else
        out << verdict_name(r.stats.verdict) << '\n';
      if (r.stats.verdict == Verdict::Unknown) {
        err << "resource limit: " << r.stats.error << '\n';
        return kResource;
      }
      return kOk;
    }
    if (*oracle) {
      auto [f, p] = oin.load();
      OracleConfig oc;
      oc.maxNodes = oracleMax;
      out << verdict_name(solve_full_oracle(f, p, oc)) << '\n';
      return kOk;
    }
    if (*gen) {
      Sink sink(genOut, out);
      if (!named.empty()) {
        GenConfig cfg = go.config();
        write_instance(*sink, to_instance(named_instance(cfg.pools, named), named));
        return kOk;
      }
      auto gs = gen_formulas(go.config(), go.count);
      for (std::size_t i = 0; i < gs.size(); ++i) write_instance(*sink, to_instance(gs[i], "gen" + std::to_string(i)));
      return kOk;
    }
    if (*gt) {
      std::vector<Instance> insts;
      if (!gsrc.input.empty()) {
        gsrc.includeLarge = true;
        insts = gsrc.load();
      } else {
        auto [f, p] = gin.load();
        insts.push_back({"cli", to_string(f), names_of(p.env()), names_of(p.sys()), 0, false});
      }
      Sink sink(gtOut, out);
      for (const auto& g : label_all(insts, gto)) write_ground_truth(*sink, g);
      return kOk;
    }
    if (*dataset) {
      auto specs = dsSpecs.empty() ? all_feature_specs() : read_specs(dsSpecs);
      auto games = label_all(dsrc.load(), dgt);
      Dataset ds = build_dataset(games, specs, dcfg);
      Sink sink(dsOut, out);
      ds.write_jsonl(*sink);
      err << "dataset: " << games.size() << " games, " << ds.size() << " rows\n";
      return kOk;
    }
    if (*train) {
      Dataset ds = read_dataset(trData);
      if (!trSpecs.empty()) ds = ds.project(read_specs(trSpecs));
      std::vector<std::string> warnings;
      PairModel m = train_gbt(ds, tro.hp, &warnings);
      for (const auto& w : warnings) err << "warning: " << w << '\n';
      std::ofstream o(trOut);
      if (!o) throw std::invalid_argument("cannot write " + trOut);
      m.save(o);
      return kOk;
    }
    if (*rfeCmd) {
      Dataset ds = read_dataset(rfData);
      Sink sink(rfOut, out);
      for (const auto& s : rfe(ds, rfo.hp, ds.specs, rfTarget)) *sink << s.name() << '\n';
      return kOk;
    }
    if (*eval) {
      auto h = make_heuristic(evHeur, evSeed);
      auto games = label_all(esrc.load(), egt);
      return print_class_scores(out, state_score_eval(*h, games), evJson);
    }
    if (*bench) {
      if (heuristics.empty()) heuristics.push_back("baseline");
      const auto insts = bsrc.load();
      std::vector<Formula> fs;
      std::vector<Partition> ps;
      for (const auto& x : insts) {
        fs.push_back(parse_ltl(x.formula));
        ps.push_back(Partition::from_names(x.ins, x.outs));
      }
      for (const auto& h : heuristics) make_heuristic(h, bso.seed);  // fail early on bad names or files
      std::vector<std::vector<RunReport>> reports(heuristics.size(), std::vector<RunReport>(insts.size()));
      parallel_for(insts.size() * heuristics.size(), jobs, [&](std::size_t k) {
        const std::size_t hi = k / insts.size(), ii = k % insts.size();
        SolveOptions o = bso;
        o.heuristic = heuristics[hi];
        auto h = make_heuristic(o.heuristic, o.seed);
        RunReport r = solve_one(fs[ii], ps[ii], o, *h, nullptr);
        r.instance = insts[ii].name;
        reports[hi][ii] = std::move(r);
      });
      Sink csv(csvPath, out);
      std::ostream& table = csvPath.empty() || csvPath == "-" ? err : out;
      *csv << "instance,heuristic,seed,verdict,timeMs,envNodes,sysNodes,solves,backtracks\n";
      for (const auto& col : reports)
        for (const auto& r : col)
          *csv << r.instance << ',' << r.heuristic << ',' << r.seed << ',' << verdict_name(r.stats.verdict) << ','
               << std::fixed << std::setprecision(3) << r.timeMs << ',' << r.stats.envNodes << ','
               << r.stats.sysNodes << ',' << r.stats.solves << ',' << r.stats.backtracks << '\n';
      const double unit = cutoffUnit == "s" ? 1000.0 : 1.0;
      table << "solved:";
      for (std::size_t hi = 0; hi < heuristics.size(); ++hi) {
        std::size_t n = std::count_if(reports[hi].begin(), reports[hi].end(),
                                      [](const RunReport& r) { return r.stats.verdict != Verdict::Unknown; });
        table << ' ' << heuristics[hi] << '=' << n << '/' << insts.size();
      }
      table << "\ngeometric mean of " << heuristics[0] << " time / heuristic time\n";
      table << "heuristic";
      const auto cuts = parse_doubles(cutoffs);
      for (double c : cuts) table << "\t>=" << c << cutoffUnit;
      table << '\n';
      for (std::size_t hi = 1; hi < heuristics.size(); ++hi) {
        table << heuristics[hi];
        for (double c : cuts) {
          std::size_t n = 0;
          double g = geomean_ratio(reports[0], reports[hi], c * unit, &n);
          table << '\t';
          if (n)
            table << std::fixed << std::setprecision(2) << g << " (" << n << ')';
          else
            table << "- (0)";
        }
        table << '\n';
      }
      return kOk;
    }
  } catch (const UnsupportedError& e) {
    err << "unsupported: " << e.what() << '\n';
    err << "offending subformula: " << e.offending() << '\n';
    return kUnsupported;
  } catch (const ResourceError& e) {
    out << verdict_name(Verdict::Unknown) << '\n';
    err << "resource limit: " << e.what() << '\n';
    return kResource;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace semsyn::cli
