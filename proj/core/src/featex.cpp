#include "semsyn/featex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "semsyn/measures.hpp"

namespace semsyn {

namespace {

constexpr const char* kBaseNames[kNumBaseFeatures] = {
    "trueness", "quantForall", "quantExists", "controllability", "temporalOps", "height", "size", "topDisjuncts",
};
constexpr const char* kAggNames[kNumAggregations] = {
    "alongMaster", "maxOverComponents", "minOverComponents", "masterOnly",
};

std::vector<std::string_view> split_dots(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto dot = s.find('.', start);
    out.push_back(s.substr(start, dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return out;
}

double fold_master(BaseFeature b, Formula f, const Partition& p) {
  switch (f.op()) {
    case Op::And: {
      double v = 1.0;
      bool first = true;
      for (Formula k : f.kids()) {
        double x = fold_master(b, k, p);
        v = first ? x : std::min(v, x);
        first = false;
      }
      return v;
    }
    case Op::Or: {
      double v = 0.0;
      bool first = true;
      for (Formula k : f.kids()) {
        double x = fold_master(b, k, p);
        v = first ? x : std::max(v, x);
        first = false;
      }
      return v;
    }
    default:
      return base_feature(b, f, p);
  }
}

}  // namespace

std::string FeatureSpec::name() const {
  switch (priority) {
    case PriorityFeature::ParityBit:
      return "priority.parity";
    case PriorityFeature::LinearScale:
      return "priority.linear";
    case PriorityFeature::None:
      break;
  }
  std::string n = kBaseNames[static_cast<int>(base)];
  n += '.';
  n += kAggNames[static_cast<int>(agg)];
  n += mode == EdgeMode::Delta ? ".delta" : ".succ";
  if (normalized) n += ".norm";
  return n;
}

FeatureSpec FeatureSpec::parse(std::string_view name) {
  FeatureSpec s;
  if (name == "priority.parity") {
    s.priority = PriorityFeature::ParityBit;
    return s;
  }
  if (name == "priority.linear") {
    s.priority = PriorityFeature::LinearScale;
    return s;
  }
  auto parts = split_dots(name);
  auto fail = [&] { throw std::invalid_argument("unknown feature '" + std::string(name) + "'"); };
  if (parts.size() < 3 || parts.size() > 4) fail();
  int b = -1, g = -1;
  for (int i = 0; i < kNumBaseFeatures; ++i)
    if (parts[0] == kBaseNames[i]) b = i;
  for (int i = 0; i < kNumAggregations; ++i)
    if (parts[1] == kAggNames[i]) g = i;
  if (b < 0 || g < 0) fail();
  s.base = static_cast<BaseFeature>(b);
  s.agg = static_cast<Aggregation>(g);
  if (parts[2] == "succ") {
    s.mode = EdgeMode::SuccessorValue;
  } else if (parts[2] == "delta") {
    s.mode = EdgeMode::Delta;
  } else {
    fail();
  }
  if (parts.size() == 4) {
    if (parts[3] != "norm") fail();
    s.normalized = true;
  }
  return s;
}

std::vector<FeatureSpec> all_feature_specs() {
  std::vector<FeatureSpec> out;
  for (int b = 0; b < kNumBaseFeatures; ++b)
    for (int g = 0; g < kNumAggregations; ++g)
      for (EdgeMode m : {EdgeMode::SuccessorValue, EdgeMode::Delta})
        for (bool norm : {false, true})
          out.push_back({static_cast<BaseFeature>(b), static_cast<Aggregation>(g), m, norm, PriorityFeature::None});
  FeatureSpec parity, linear;
  parity.priority = PriorityFeature::ParityBit;
  linear.priority = PriorityFeature::LinearScale;
  out.push_back(parity);
  out.push_back(linear);
  return out;
}

double base_feature(BaseFeature b, Formula f, const Partition& p) {
  switch (b) {
    case BaseFeature::Trueness:
      return trueness(f);
    case BaseFeature::QuantForall:
      return quantified_trueness(f, p, Player::Sys, Quantifier::Forall);
    case BaseFeature::QuantExists:
      return quantified_trueness(f, p, Player::Sys, Quantifier::Exists);
    case BaseFeature::Controllability:
      return controllability(f, p, Player::Sys);
    case BaseFeature::TemporalOps:
      return static_cast<double>(syntactic_measures(f).temporalOps);
    case BaseFeature::Height:
      return static_cast<double>(syntactic_measures(f).height);
    case BaseFeature::Size:
      return static_cast<double>(syntactic_measures(f).size);
    case BaseFeature::TopDisjuncts:
      return static_cast<double>(syntactic_measures(f).topDisjuncts);
  }
  return 0.0;
}

double state_feature(BaseFeature b, Aggregation g, const Automaton& a, StateId s) {
  const Partition& p = a.partition();
  Formula master = a.master(s);
  switch (g) {
    case Aggregation::AlongMaster:
      return fold_master(b, master, p);
    case Aggregation::MasterOnly:
      return base_feature(b, master, p);
    case Aggregation::MaxOverComponents:
    case Aggregation::MinOverComponents: {
      auto comps = a.progress(s);
      if (comps.empty()) return base_feature(b, master, p);
      double v = g == Aggregation::MaxOverComponents ? -std::numeric_limits<double>::infinity()
                                                     : std::numeric_limits<double>::infinity();
      for (const auto& [atom, f] : comps) {
        double x = base_feature(b, f, p);
        v = g == Aggregation::MaxOverComponents ? std::max(v, x) : std::min(v, x);
      }
      return v;
    }
  }
  return 0.0;
}

double FeatureCache::get(const Automaton& a, StateId s, BaseFeature b, Aggregation g) {
  if (owner_ != &a) {
    values_.clear();
    owner_ = &a;
  }
  auto [it, fresh] = values_.try_emplace(s);
  if (fresh) it->second.fill(std::numeric_limits<double>::quiet_NaN());
  double& slot = it->second[static_cast<int>(b) * kNumAggregations + static_cast<int>(g)];
  if (std::isnan(slot)) {
    ++misses_;
    slot = state_feature(b, g, a, s);
  } else {
    ++hits_;
  }
  return slot;
}

std::vector<FeatureVector> sibling_features(const std::vector<FeatureSpec>& specs, const Automaton& a, StateId source,
                                            const std::vector<EdgeTarget>& siblings, FeatureCache* cache) {
  auto value = [&](StateId s, const FeatureSpec& spec) {
    return cache ? cache->get(a, s, spec.base, spec.agg) : state_feature(spec.base, spec.agg, a, s);
  };
  std::vector<FeatureVector> out(siblings.size(), FeatureVector(specs.size(), 0.0));
  for (std::size_t j = 0; j < specs.size(); ++j) {
    const FeatureSpec& spec = specs[j];
    for (std::size_t i = 0; i < siblings.size(); ++i) {
      const EdgeTarget& e = siblings[i];
      double x = 0.0;
      switch (spec.priority) {
        case PriorityFeature::ParityBit:
          x = e.priority % 2 == 0 ? 1.0 : 0.0;
          break;
        case PriorityFeature::LinearScale:
          x = (e.priority % 2 == 0 ? 1.0 : -1.0) / (1.0 + static_cast<double>(e.priority));
          break;
        case PriorityFeature::None:
          x = value(e.target, spec);
          if (spec.mode == EdgeMode::Delta) x -= value(source, spec);
          break;
      }
      out[i][j] = x;
    }
    if (spec.normalized && spec.priority == PriorityFeature::None) {
      double lo = out[0][j], hi = out[0][j];
      for (const auto& row : out) {
        lo = std::min(lo, row[j]);
        hi = std::max(hi, row[j]);
      }
      for (auto& row : out) row[j] = hi > lo ? (row[j] - lo) / (hi - lo) : 0.5;
    }
  }
  return out;
}

FeatureVector edge_features(const std::vector<FeatureSpec>& specs, const Automaton& a, StateId source,
                            const std::vector<EdgeTarget>& siblings, std::size_t index, FeatureCache* cache) {
  return sibling_features(specs, a, source, siblings, cache).at(index);
}

}  // namespace semsyn
