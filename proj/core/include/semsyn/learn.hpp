#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "semsyn/explore.hpp"
#include "semsyn/guide.hpp"
#include "semsyn/psolve.hpp"

namespace semsyn {

// ---------------------------------------------------------------------------
// Formula generation

/// Templates over placeholders {e0}, {e1}, ... (environment) and {s0}, {s1},
/// ... (system), plus named fixed instances.
struct PatternPools {
  struct Instance {
    std::vector<std::string> ins, outs;
    std::string formula;
  };
  std::vector<std::string> assumptions;
  std::vector<std::string> guarantees;
  std::map<std::string, Instance> instances;

  static PatternPools from_json(const nlohmann::json& j);
  static PatternPools load_file(const std::string& path);
  /// The pools compiled into the library.
  static const PatternPools& defaults();
};

struct GenConfig {
  PatternPools pools = PatternPools::defaults();
  int maxDisjuncts = 2;       // per side of the implication
  int maxConjuncts = 2;       // templates per disjunct
  int envProps = 2;
  int sysProps = 2;
  std::uint64_t seed = 1;
  std::size_t maxTrainStates = 500;
  /// Automaton construction is abandoned past this many states.
  std::size_t largeThreshold = 20'000;
  std::size_t maxAttempts = 100;  // rejection sampling per output
};

struct GeneratedInstance {
  std::string text;  // "(A) -> (G)"
  Formula formula;
  Partition partition;
  std::size_t automatonStates = 0;  // capped at largeThreshold + 1
  bool large = false;
};

/// One sample of the shape (DNF of assumptions) -> (DNF of guarantees), not
/// yet checked against the supported fragment.
std::string sample_formula_text(const GenConfig& cfg, std::mt19937_64& rng);

/// n instances that pass decompose; deterministic under cfg.seed. Throws
/// std::runtime_error when rejection sampling runs out of attempts.
std::vector<GeneratedInstance> gen_formulas(const GenConfig& cfg, std::size_t n);

/// Number of reachable automaton states, or cap + 1 when there are more.
std::size_t count_automaton_states(Formula f, const Partition& p, std::size_t cap);

/// A named instance from the pools.
GeneratedInstance named_instance(const PatternPools& pools, const std::string& name);

// ---------------------------------------------------------------------------
// Ground truth

/// Per-node decayed score: +gamma^d for system-won nodes, -gamma^d for
/// environment-won ones, d being the attractor distance to the winner's
/// certainty core. The score of an edge is the score of its target.
std::vector<double> gt_exact_nodes(const SolveView& v, const Regions& r, double gamma);

/// Per-edge scores (aligned with v.target) derived from gt_exact_nodes.
std::vector<double> gt_exact_edges(const SolveView& v, const Regions& r, double gamma);

struct MctsConfig {
  double gamma = 0.9;
  double epsilon = 0.1;           // critical-path window
  std::size_t criticalDepth = 8;  // D0
  std::size_t iterations = 10'000;
  double exploration = 1.5;
  std::uint64_t seed = 1;
};

/// Per-edge estimates in [-1, 1] aligned with v.target. `fixed` optionally
/// pins node values (NaN = free); pinned nodes end a simulation. Iterations
/// are spread round-robin over `roots` (all nodes with two or more distinct
/// successors when empty).
std::vector<double> gt_mcts_edges(const SolveView& v, const MctsConfig& cfg, const std::vector<double>& fixed = {},
                                  std::vector<std::uint32_t> roots = {});

/// One choice point of a labelled game.
struct LabeledChoice {
  bool sysOwned = false;
  NodeId node = kNoNode;
  StateId source = 0;
  StateClass cls;
  /// Winner of the choice node, when known.
  std::optional<Player> winner;
  std::vector<Candidate> cands;
  std::vector<double> gt;
};

struct LabeledGame {
  std::string text;
  std::shared_ptr<PartialArena> arena;
  std::vector<LabeledChoice> choices;
  std::string tag;  // "exact" or "mcts"
};

struct GtConfig {
  double gamma = 0.9;
  std::size_t maxNodes = 200'000;
  MctsConfig mcts;
};

/// Exact labels over the full arena; falls back to MCTS over the arena
/// explored up to the node budget when it does not fit.
LabeledGame label_game(Formula f, const Partition& p, const GtConfig& cfg, std::string text = {});

/// JSONL dump: one {edgeKey, score, tag, class, node} object per candidate.
void write_ground_truth(std::ostream& out, const LabeledGame& g);

// ---------------------------------------------------------------------------
// Datasets

struct DatasetRow {
  FeatureVector a, b;
  double label = 0.0;  // +1 when a is the better move for the choice's owner, -1 otherwise
  double weight = 0.0;
  nlohmann::json meta;
};

struct Dataset {
  std::vector<FeatureSpec> specs;
  std::array<std::vector<DatasetRow>, kNumStateClasses> rows;

  std::size_t size() const;
  /// Keeps only the listed spec columns, in that order.
  Dataset project(const std::vector<FeatureSpec>& keep) const;
  /// Header line {"specs": [...]} then one {class, featsA, featsB, diffs,
  /// label, weight, meta} object per row.
  void write_jsonl(std::ostream& out) const;
  static Dataset read_jsonl(std::istream& in);
};

struct DatasetConfig {
  std::size_t capPerClass = 100'000;
  std::uint64_t seed = 1;
};

/// One row per choice and unordered candidate pair with differing scores,
/// orientation randomized; each class is subsampled down to the cap.
Dataset build_dataset(const std::vector<LabeledGame>& games, const std::vector<FeatureSpec>& specs,
                      const DatasetConfig& cfg);

// ---------------------------------------------------------------------------
// Training

struct GbtParams {
  int trees = 15;
  int depth = 2;
  double learningRate = 0.2;
  std::size_t minLeaf = 5;
  double lambda = 1.0;
};

/// Newton boosting with logistic loss over the pair input. `importance`, if
/// given, receives the total split gain per input column (3 per spec).
ClassModel train_class(const std::vector<DatasetRow>& rows, const std::vector<FeatureSpec>& specs,
                       const GbtParams& hp, std::vector<double>* importance = nullptr, std::string* warning = nullptr);

/// Trains every class that has at least two rows.
PairModel train_gbt(const Dataset& ds, const GbtParams& hp, std::vector<std::string>* warnings = nullptr);

/// Recursive feature elimination down to targetCount specs.
std::vector<FeatureSpec> rfe(const Dataset& ds, const GbtParams& hp, const std::vector<FeatureSpec>& startSpecs,
                             std::size_t targetCount);

// ---------------------------------------------------------------------------
// Evaluation

struct ClassScore {
  double mean = 0.0;
  std::size_t states = 0;
};

/// Mean state-wise score of the heuristic's top choice per class, over
/// choices the owner wins and whose candidates do not all score alike.
std::array<ClassScore, kNumStateClasses> state_score_eval(Heuristic& h, const std::vector<LabeledGame>& games);

}  // namespace semsyn
