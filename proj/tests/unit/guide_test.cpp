#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "semsyn/guide.hpp"
#include "semsyn/measures.hpp"
#include "semsyn/parser.hpp"

using namespace semsyn;

namespace {

Partition part(std::vector<std::string> env, std::vector<std::string> sys) {
  return Partition::from_names(env, sys);
}

// All states reachable from the initial one.
std::vector<StateId> reachable(Automaton& a) {
  std::vector<StateId> out{a.initial()};
  std::set<StateId> seen{a.initial()};
  const std::uint64_t letters = std::uint64_t{1} << a.partition().width();
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::uint64_t l = 0; l < letters; ++l) {
      StateId t = a.successor(out[i], l).target;
      if (seen.insert(t).second) out.push_back(t);
    }
  return out;
}

// A handmade model with one depth-2 tree per step over the pair input.
ClassModel toy_model(std::size_t specs) {
  ClassModel m;
  m.specs = all_feature_specs();
  m.specs.resize(specs);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 5; ++k) {
    Tree t;
    auto fi = [&] { return static_cast<std::uint32_t>(rng() % (3 * specs)); };
    t.splits = {{fi(), u(rng), 1, 2}, {fi(), u(rng), -1, -2}, {fi(), u(rng), -3, -4}};
    t.leaves = {u(rng), u(rng), u(rng), u(rng)};
    m.trees.push_back(t);
  }
  m.baseScore = 0.25;
  return m;
}

}  // namespace

TEST(FeatureSpec, NamesRoundTripAndCount) {
  auto specs = all_feature_specs();
  EXPECT_EQ(specs.size(), 130U);
  std::set<std::string> names;
  for (const auto& s : specs) {
    EXPECT_EQ(FeatureSpec::parse(s.name()), s);
    names.insert(s.name());
  }
  EXPECT_EQ(names.size(), specs.size());
  EXPECT_THROW(FeatureSpec::parse("trueness.sideways.succ"), std::invalid_argument);
}

TEST(StateFeature, LabelChainExampleMasterTrueness) {
  Automaton aut(parse_ltl("!a | G F (a & X b)"), part({"a"}, {"b"}));
  EXPECT_DOUBLE_EQ(state_feature(BaseFeature::Trueness, Aggregation::MasterOnly, aut, aut.initial()), 0.75);
}

TEST(StateFeature, TrueMasterAndSingleComponent) {
  Automaton top(tt(), part({"a"}, {"b"}));
  EXPECT_DOUBLE_EQ(state_feature(BaseFeature::Trueness, Aggregation::AlongMaster, top, top.initial()), 1.0);

  Automaton gf(parse_ltl("G F (a & X b)"), part({"a"}, {"b"}));
  auto comps = gf.progress(gf.initial());
  ASSERT_EQ(comps.size(), 1U);
  EXPECT_DOUBLE_EQ(state_feature(BaseFeature::TemporalOps, Aggregation::MaxOverComponents, gf, gf.initial()),
                   static_cast<double>(syntactic_measures(comps[0].second).temporalOps));
}

TEST(EdgeFeatures, PriorityFeatures) {
  Automaton aut(parse_ltl("G F b"), part({"a"}, {"b"}));
  std::vector<FeatureSpec> specs = {FeatureSpec::parse("priority.parity"), FeatureSpec::parse("priority.linear")};
  auto rows = sibling_features(specs, aut, aut.initial(), {{aut.initial(), 0}, {aut.initial(), 3}}, nullptr);
  EXPECT_EQ(rows[0], (FeatureVector{1.0, 1.0}));
  EXPECT_EQ(rows[1], (FeatureVector{0.0, -0.25}));
}

TEST(EdgeFeatures, NormalizationAcrossSiblings) {
  Automaton aut(parse_ltl("G (a -> F b) & G F (a | b)"), part({"a"}, {"b"}));
  auto states = reachable(aut);
  ASSERT_GE(states.size(), 2U);
  std::vector<EdgeTarget> sibs;
  for (StateId s : states) sibs.push_back({s, 1});
  for (const auto& spec : all_feature_specs()) {
    if (!spec.normalized) continue;
    auto rows = sibling_features({spec}, aut, aut.initial(), sibs, nullptr);
    double lo = 1.0, hi = 0.0;
    for (const auto& r : rows) {
      EXPECT_GE(r[0], 0.0);
      EXPECT_LE(r[0], 1.0);
      lo = std::min(lo, r[0]);
      hi = std::max(hi, r[0]);
    }
    if (lo != hi) {
      EXPECT_EQ(lo, 0.0) << spec.name();
      EXPECT_EQ(hi, 1.0) << spec.name();
    } else {
      EXPECT_EQ(lo, 0.5) << spec.name();
    }
    // A single sibling always sits at the midpoint.
    EXPECT_EQ(sibling_features({spec}, aut, aut.initial(), {sibs[0]}, nullptr)[0][0], 0.5);
  }
}

TEST(EdgeFeatures, MinMaxRescale) {
  // Two successors whose trueness differs: normalized values are exactly 0 and 1.
  Automaton aut(parse_ltl("a | X (b & X b)"), part({"a"}, {"b"}));
  auto states = reachable(aut);
  StateId lo = states[0], hi = states[0];
  for (StateId s : states) {
    if (trueness(aut.master(s)) < trueness(aut.master(lo))) lo = s;
    if (trueness(aut.master(s)) > trueness(aut.master(hi))) hi = s;
  }
  ASSERT_NE(trueness(aut.master(lo)), trueness(aut.master(hi)));
  auto rows = sibling_features({FeatureSpec::parse("trueness.masterOnly.succ.norm")}, aut, aut.initial(),
                               {{lo, 0}, {hi, 0}}, nullptr);
  EXPECT_EQ(rows[0][0], 0.0);
  EXPECT_EQ(rows[1][0], 1.0);
}

TEST(EdgeFeatures, CacheIsTransparent) {
  Automaton aut(parse_ltl("G (a -> X F b) & (F G b | G F !a)"), part({"a"}, {"b"}));
  auto states = reachable(aut);
  std::vector<EdgeTarget> sibs;
  for (std::size_t i = 0; i < states.size(); ++i) sibs.push_back({states[i], static_cast<std::uint32_t>(i % 4)});
  FeatureCache cache;
  auto specs = all_feature_specs();
  for (StateId src : states) {
    auto plain = sibling_features(specs, aut, src, sibs, nullptr);
    auto cached = sibling_features(specs, aut, src, sibs, &cache);
    auto again = sibling_features(specs, aut, src, sibs, &cache);
    EXPECT_EQ(plain, cached);
    EXPECT_EQ(plain, again);
  }
  EXPECT_GT(cache.hits(), 0U);
}

TEST(EdgeFeatures, NormalizedIgnoresPositiveScaling) {
  // Size and height are integer counts; scaling them is mimicked by comparing
  // the raw column rescaled by hand with the normalized column.
  Automaton aut(parse_ltl("G (a -> X F b) & F G (a | b)"), part({"a"}, {"b"}));
  auto states = reachable(aut);
  std::vector<EdgeTarget> sibs;
  for (StateId s : states) sibs.push_back({s, 0});
  for (const char* base : {"size", "height", "temporalOps", "trueness"}) {
    std::string raw = std::string(base) + ".masterOnly.succ";
    auto r = sibling_features({FeatureSpec::parse(raw), FeatureSpec::parse(raw + ".norm")}, aut, aut.initial(), sibs,
                              nullptr);
    std::vector<double> scaled;
    for (const auto& row : r) scaled.push_back(3.5 * row[0]);
    double lo = *std::min_element(scaled.begin(), scaled.end());
    double hi = *std::max_element(scaled.begin(), scaled.end());
    for (std::size_t i = 0; i < r.size(); ++i) {
      double expect = hi > lo ? (scaled[i] - lo) / (hi - lo) : 0.5;
      EXPECT_NEAR(r[i][1], expect, 1e-12) << raw;
    }
  }
}

TEST(Classify, Examples) {
  Automaton gf(parse_ltl("G F a"), part({"a"}, {"b"}));
  EXPECT_EQ(classify_state(gf, gf.initial(), Player::Sys), (StateClass{Player::Sys, true}));
  Automaton two(parse_ltl("G F a | F G b"), part({"a"}, {"b"}));
  EXPECT_EQ(classify_state(two, two.initial(), Player::Env), (StateClass{Player::Env, false}));
  Automaton top(tt(), part({"a"}, {"b"}));
  EXPECT_TRUE(classify_state(top, top.initial(), Player::Env).trivial);
  for (int i = 0; i < kNumStateClasses; ++i) {
    auto c = StateClass::from_index(i);
    EXPECT_EQ(c.index(), i);
    EXPECT_EQ(StateClass::parse(c.name()), c);
  }
  EXPECT_EQ(StateClass::from_index(2).name(), "sys0");
}

TEST(Baseline, OrdersByTruenessThenParity) {
  Automaton aut(parse_ltl("a | X (b & X b)"), part({"a"}, {"b"}));
  auto states = reachable(aut);
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < states.size(); ++i)
    cands.push_back({states[i], static_cast<std::uint32_t>(i % 3), candidate_key(states[i], i % 3, i)});
  for (Player owner : {Player::Sys, Player::Env}) {
    auto order = rank_baseline(Choice{&aut, aut.initial(), owner}, cands);
    ASSERT_EQ(order.size(), cands.size());
    for (std::size_t k = 1; k < order.size(); ++k) {
      double x = trueness(aut.master(cands[order[k - 1]].target));
      double y = trueness(aut.master(cands[order[k]].target));
      if (owner == Player::Sys) EXPECT_GE(x, y); else EXPECT_LE(x, y);
    }
  }
  // Equal trueness: the system prefers the even priority, the environment the odd one.
  StateId s = aut.initial();
  std::vector<Candidate> tie = {{s, 1, candidate_key(s, 1, 0)}, {s, 2, candidate_key(s, 2, 0)}};
  EXPECT_EQ(rank_baseline(Choice{&aut, s, Player::Sys}, tie)[0], 1U);
  EXPECT_EQ(rank_baseline(Choice{&aut, s, Player::Env}, tie)[0], 0U);
}

TEST(PairModelTest, CompareIsExactlyAntisymmetric) {
  ClassModel m = toy_model(6);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    FeatureVector a(6), b(6);
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng);
    EXPECT_EQ(m.compare(a, b), -m.compare(b, a));
    EXPECT_EQ(m.compare(a, a), 0.0);
  }
}

TEST(PairModelTest, TwoAndThreeEdges) {
  // One stump on featA[0] - featB[0]: +1 when a is larger, -1 otherwise.
  ClassModel m;
  m.specs = {FeatureSpec::parse("trueness.masterOnly.succ")};
  Tree t;
  t.splits = {{2, 0.0, -1, -2}};
  t.leaves = {-1.0, 1.0};
  m.trees = {t};
  std::vector<FeatureVector> rows = {{0.2}, {0.9}};
  EXPECT_EQ(rank_pairwise(m, rows, {0, 1}), (std::vector<std::size_t>{1, 0}));
  rows = {{0.5}, {0.1}, {0.9}};
  EXPECT_EQ(rank_pairwise(m, rows, {0, 1, 2}), (std::vector<std::size_t>{2, 0, 1}));
  // Constant model: every score ties, the baseline order stands.
  ClassModel flat;
  flat.specs = m.specs;
  EXPECT_EQ(rank_pairwise(flat, rows, {1, 2, 0}), (std::vector<std::size_t>{1, 2, 0}));
}

TEST(PairModelTest, PivotSchemeComparisonCount) {
  ClassModel m = toy_model(4);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<FeatureVector> rows(20, FeatureVector(4));
  for (auto& r : rows)
    for (auto& x : r) x = u(rng);
  std::vector<std::size_t> base(20);
  for (std::size_t i = 0; i < 20; ++i) base[i] = i;
  std::size_t count = 0;
  auto order = rank_pairwise(m, rows, base, &count);
  EXPECT_EQ(count, 20U * 4U - 4U + 8U * 7U);
  std::vector<std::size_t> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, base);

  std::size_t small = 0;
  rows.resize(16);
  base.resize(16);
  rank_pairwise(m, rows, base, &small);
  EXPECT_EQ(small, 16U * 15U);
}

TEST(PairModelTest, RankingIgnoresInputOrder) {
  Automaton aut(parse_ltl("G (a -> X F b) & (F G b | G F !a)"), part({"a"}, {"b"}));
  auto states = reachable(aut);
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < 24; ++i) {
    StateId s = states[i % states.size()];
    cands.push_back({s, static_cast<std::uint32_t>(i % 4), candidate_key(s, i % 4, i)});
  }
  ClassModel m = toy_model(8);
  std::mt19937_64 rng(5);
  for (std::size_t n : {std::size_t{5}, std::size_t{24}}) {
    std::vector<Candidate> c(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(n));
    auto keys = [&](const std::vector<Candidate>& cs, const std::vector<std::size_t>& order) {
      std::vector<std::uint64_t> out;
      for (auto i : order) out.push_back(cs[i].key);
      return out;
    };
    auto ref = keys(c, rank_model(m, Choice{&aut, aut.initial(), Player::Sys}, c, nullptr));
    for (int trial = 0; trial < 5; ++trial) {
      std::shuffle(c.begin(), c.end(), rng);
      EXPECT_EQ(keys(c, rank_model(m, Choice{&aut, aut.initial(), Player::Sys}, c, nullptr)), ref);
    }
  }
}

TEST(PairModelTest, JsonRoundTripIsBitIdentical) {
  PairModel pm;
  pm.classes[0] = toy_model(5);
  pm.classes[3] = toy_model(7);
  pm.trainingMeta = {{"seed", 1}};
  std::stringstream ss;
  pm.save(ss);
  PairModel back = PairModel::load(ss);
  EXPECT_FALSE(back.classes[1].has_value());
  ASSERT_TRUE(back.classes[3].has_value());
  EXPECT_EQ(back.to_json(), pm.to_json());
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    FeatureVector a(7), b(7);
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng);
    EXPECT_EQ(back.classes[3]->compare(a, b), pm.classes[3]->compare(a, b));
  }
  auto j = pm.to_json();
  EXPECT_TRUE(j["classes"].contains("env0"));
  EXPECT_TRUE(j["classes"].contains("sys1"));
}

TEST(PairModelTest, RejectsMalformedFiles) {
  auto load = [](const std::string& s) {
    std::istringstream in(s);
    return PairModel::load(in);
  };
  EXPECT_THROW(load("{"), std::invalid_argument);
  EXPECT_THROW(load(R"({"version":2,"classes":{}})"), std::invalid_argument);
  EXPECT_THROW(load(R"({"version":1,"classes":{"env7":{}}})"), std::invalid_argument);
  EXPECT_THROW(load(R"({"version":1,"classes":{"env0":{"featureSpecs":["nope.x.succ"],"trees":[]}}})"),
               std::invalid_argument);
  EXPECT_THROW(load(R"({"version":1,"classes":{"env0":{"featureSpecs":["priority.parity"],
               "trees":[{"splits":[{"featureIndex":9,"threshold":0,"left":-1,"right":-2}],"leaves":[0,1]}]}}})"),
               std::invalid_argument);
  EXPECT_THROW(load(R"({"version":1,"classes":{"env0":{"trees":[]}}})"), std::invalid_argument);
}

TEST(ModelHeuristicTest, FallsBackToBaselineForMissingClass) {
  Automaton aut(parse_ltl("a | X (b & X b)"), part({"a"}, {"b"}));
  auto states = reachable(aut);
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < states.size(); ++i) cands.push_back({states[i], 0, candidate_key(states[i], 0, i)});
  ModelHeuristic h(std::make_shared<PairModel>());
  Choice c{&aut, aut.initial(), Player::Sys};
  EXPECT_EQ(h.rank(c, cands), rank_baseline(c, cands));
}
