#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "semsyn/featex.hpp"

namespace semsyn {

/// Owner of the choice and whether its acceptance structure is trivial
/// (at most one live Rabin pair). Names: env0, env1, sys0, sys1.
struct StateClass {
  Player owner = Player::Sys;
  bool trivial = false;

  int index() const { return (owner == Player::Sys ? 2 : 0) + (trivial ? 1 : 0); }
  std::string name() const;
  static StateClass from_index(int i) { return {i >= 2 ? Player::Sys : Player::Env, (i % 2) == 1}; }
  static std::optional<StateClass> parse(std::string_view name);
  bool operator==(const StateClass&) const = default;
};
inline constexpr int kNumStateClasses = 4;

StateClass classify_state(Automaton& a, StateId s, Player owner);

/// One outgoing edge of a choice. For environment choices the target is a
/// representative successor of the system node reached.
struct Candidate {
  StateId target;
  std::uint32_t priority;
  /// Canonical tie key: target state, priority, letter.
  std::uint64_t key;
};

std::uint64_t candidate_key(StateId target, std::uint32_t priority, std::uint64_t letter);

struct Choice {
  Automaton* aut;
  StateId source;
  Player owner;
};

/// Edge ranking: returns candidate indices, best first.
class Heuristic {
 public:
  virtual ~Heuristic() = default;
  virtual std::string name() const = 0;
  virtual std::vector<std::size_t> rank(const Choice& c, const std::vector<Candidate>& cands) = 0;
};

/// System: descending successor trueness; environment: ascending. Ties:
/// the owner's favourable priority parity first, then the canonical key.
std::vector<std::size_t> rank_baseline(const Choice& c, const std::vector<Candidate>& cands);

class BaselineHeuristic : public Heuristic {
 public:
  std::string name() const override { return "baseline"; }
  std::vector<std::size_t> rank(const Choice& c, const std::vector<Candidate>& cands) override {
    return rank_baseline(c, cands);
  }
};

/// Baseline order reversed; the worst advice the baseline can give.
class ReverseHeuristic : public Heuristic {
 public:
  std::string name() const override { return "reverse"; }
  std::vector<std::size_t> rank(const Choice& c, const std::vector<Candidate>& cands) override;
};

class RandomHeuristic : public Heuristic {
 public:
  explicit RandomHeuristic(std::uint64_t seed) : rng_(seed) {}
  std::string name() const override { return "random"; }
  std::vector<std::size_t> rank(const Choice& c, const std::vector<Candidate>& cands) override;

 private:
  std::mt19937_64 rng_;
};

/// Regression tree over the pair input. Child references: >= 0 is a split
/// index, < 0 is leaf -(k + 1). A tree without splits is the single leaf 0.
struct Tree {
  struct Split {
    std::uint32_t featureIndex;
    double threshold;  // go left when x <= threshold
    std::int32_t left;
    std::int32_t right;
  };
  std::vector<Split> splits;
  std::vector<double> leaves;

  double eval(const double* x) const;
};

struct ClassModel {
  std::vector<FeatureSpec> specs;
  std::vector<Tree> trees;
  double baseScore = 0.0;

  /// Raw margin for the input featA ++ featB ++ (featA - featB).
  double margin(const double* x) const;
  /// Antisymmetrized confidence that a is better than b.
  double compare(const FeatureVector& a, const FeatureVector& b) const;
};

/// Four class models (some possibly absent) plus free-form metadata.
struct PairModel {
  std::array<std::optional<ClassModel>, kNumStateClasses> classes;
  nlohmann::json trainingMeta = nlohmann::json::object();

  nlohmann::json to_json() const;
  /// Throws std::invalid_argument on schema errors or unknown feature names.
  static PairModel from_json(const nlohmann::json& j);
  void save(std::ostream& out) const;
  static PairModel load(std::istream& in);
  static PairModel load_file(const std::string& path);

 private:
  static PairModel from_json_unchecked(const nlohmann::json& j);
};

/// Pairwise ranking. Up to 16 candidates: full round robin. Beyond that, four
/// pivots at baseline quantiles give a first guess, and its best 8 play a
/// full round. `comparisons` counts antisymmetrized comparisons.
std::vector<std::size_t> rank_model(const ClassModel& m, const Choice& c, const std::vector<Candidate>& cands,
                                    FeatureCache* cache, std::size_t* comparisons = nullptr);

/// Same scheme over precomputed feature rows and a given baseline order.
std::vector<std::size_t> rank_pairwise(const ClassModel& m, const std::vector<FeatureVector>& rows,
                                       const std::vector<std::size_t>& baseline, std::size_t* comparisons = nullptr);

class ModelHeuristic : public Heuristic {
 public:
  explicit ModelHeuristic(std::shared_ptr<const PairModel> m) : model_(std::move(m)) {}
  std::string name() const override { return "model"; }
  std::vector<std::size_t> rank(const Choice& c, const std::vector<Candidate>& cands) override;
  const FeatureCache& cache() const { return cache_; }

 private:
  std::shared_ptr<const PairModel> model_;
  FeatureCache cache_;
};

}  // namespace semsyn
