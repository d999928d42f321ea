#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "semsyn/automaton.hpp"

namespace semsyn {

enum class BaseFeature : std::uint8_t {
  Trueness,
  QuantForall,
  QuantExists,
  Controllability,
  TemporalOps,
  Height,
  Size,
  TopDisjuncts,
};
inline constexpr int kNumBaseFeatures = 8;

enum class Aggregation : std::uint8_t { AlongMaster, MaxOverComponents, MinOverComponents, MasterOnly };
inline constexpr int kNumAggregations = 4;

enum class EdgeMode : std::uint8_t { SuccessorValue, Delta };

enum class PriorityFeature : std::uint8_t { None, ParityBit, LinearScale };

/// One feature of an edge. Priority features ignore the other fields.
struct FeatureSpec {
  BaseFeature base = BaseFeature::Trueness;
  Aggregation agg = Aggregation::MasterOnly;
  EdgeMode mode = EdgeMode::SuccessorValue;
  bool normalized = false;
  PriorityFeature priority = PriorityFeature::None;

  /// Canonical name, e.g. "trueness.alongMaster.delta.norm" or "priority.parity".
  std::string name() const;
  /// Inverse of name(); throws std::invalid_argument on unknown names.
  static FeatureSpec parse(std::string_view name);
  bool operator==(const FeatureSpec&) const = default;
};

/// The full enumerable family: every base x aggregation x mode x
/// normalization, followed by the two priority features.
std::vector<FeatureSpec> all_feature_specs();

/// Base feature of a single formula. Quantified and controllability
/// features are taken from the system's point of view.
double base_feature(BaseFeature b, Formula f, const Partition& p);

/// Per-state values of every (base, aggregation), computed lazily. Confined
/// to one solve; switching to another automaton drops the stored values.
class FeatureCache {
 public:
  double get(const Automaton& a, StateId s, BaseFeature b, Aggregation g);
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  std::unordered_map<StateId, std::array<double, kNumBaseFeatures * kNumAggregations>> values_;
  const Automaton* owner_ = nullptr;
  std::size_t hits_ = 0, misses_ = 0;
};

/// Uncached state feature.
double state_feature(BaseFeature b, Aggregation g, const Automaton& a, StateId s);

struct EdgeTarget {
  StateId target;
  std::uint32_t priority;
};

using FeatureVector = std::vector<double>;

/// Features of every sibling edge leaving `source`, aligned with `specs`.
/// Normalized features are min-max rescaled across the siblings; a constant
/// column maps to 0.5. `cache` may be null.
std::vector<FeatureVector> sibling_features(const std::vector<FeatureSpec>& specs, const Automaton& a, StateId source,
                                            const std::vector<EdgeTarget>& siblings, FeatureCache* cache);

/// Features of sibling `index` alone.
FeatureVector edge_features(const std::vector<FeatureSpec>& specs, const Automaton& a, StateId source,
                            const std::vector<EdgeTarget>& siblings, std::size_t index, FeatureCache* cache);

}  // namespace semsyn
