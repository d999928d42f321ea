#include "semsyn/guide.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "semsyn/measures.hpp"

namespace semsyn {

namespace {
constexpr const char* kClassNames[kNumStateClasses] = {"env0", "env1", "sys0", "sys1"};
constexpr std::size_t kExactRankLimit = 16;
constexpr std::size_t kSecondRound = 8;
}  // namespace

std::string StateClass::name() const { return kClassNames[index()]; }

std::optional<StateClass> StateClass::parse(std::string_view name) {
  for (int i = 0; i < kNumStateClasses; ++i)
    if (name == kClassNames[i]) return from_index(i);
  return std::nullopt;
}

StateClass classify_state(Automaton& a, StateId s, Player owner) {
  return StateClass{owner, a.live_pairs(s) <= 1};
}

std::uint64_t candidate_key(StateId target, std::uint32_t priority, std::uint64_t letter) {
  return std::uint64_t{target} << 32 | std::uint64_t{std::min<std::uint32_t>(priority, 0xffff)} << 16 |
         (letter & 0xffff);
}

std::vector<std::size_t> rank_baseline(const Choice& c, const std::vector<Candidate>& cands) {
  std::vector<double> tr(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) tr[i] = trueness(c.aut->master(cands[i].target));
  const bool sys = c.owner == Player::Sys;
  std::vector<std::size_t> order(cands.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (tr[x] != tr[y]) return sys ? tr[x] > tr[y] : tr[x] < tr[y];
    const bool fx = (cands[x].priority % 2 == 0) == sys, fy = (cands[y].priority % 2 == 0) == sys;
    if (fx != fy) return fx;
    return cands[x].key < cands[y].key;
  });
  return order;
}

std::vector<std::size_t> ReverseHeuristic::rank(const Choice& c, const std::vector<Candidate>& cands) {
  auto order = rank_baseline(c, cands);
  std::reverse(order.begin(), order.end());
  return order;
}

std::vector<std::size_t> RandomHeuristic::rank(const Choice&, const std::vector<Candidate>& cands) {
  // Shuffle a key-sorted order so the result does not depend on input order.
  std::vector<std::size_t> order(cands.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return cands[x].key < cands[y].key; });
  std::shuffle(order.begin(), order.end(), rng_);
  return order;
}

double Tree::eval(const double* x) const {
  if (splits.empty()) return leaves.empty() ? 0.0 : leaves[0];
  std::int32_t node = 0;
  while (node >= 0) {
    const Split& s = splits[static_cast<std::size_t>(node)];
    node = x[s.featureIndex] <= s.threshold ? s.left : s.right;
  }
  return leaves[static_cast<std::size_t>(-node - 1)];
}

double ClassModel::margin(const double* x) const {
  double m = baseScore;
  for (const Tree& t : trees) m += t.eval(x);
  return m;
}

double ClassModel::compare(const FeatureVector& a, const FeatureVector& b) const {
  const std::size_t m = a.size();
  std::vector<double> ab(3 * m), ba(3 * m);
  for (std::size_t i = 0; i < m; ++i) {
    ab[i] = a[i];
    ab[m + i] = b[i];
    ab[2 * m + i] = a[i] - b[i];
    ba[i] = b[i];
    ba[m + i] = a[i];
    ba[2 * m + i] = b[i] - a[i];
  }
  return (margin(ab.data()) - margin(ba.data())) / 2.0;
}

std::vector<std::size_t> rank_pairwise(const ClassModel& m, const std::vector<FeatureVector>& rows,
                                       const std::vector<std::size_t>& baseline, std::size_t* comparisons) {
  const std::size_t n = rows.size();
  std::vector<std::size_t> pos(n);
  for (std::size_t r = 0; r < n; ++r) pos[baseline[r]] = r;
  std::size_t count = 0;
  auto cmp = [&](std::size_t i, std::size_t j) {
    ++count;
    return m.compare(rows[i], rows[j]);
  };
  // Sorts `items` by descending score, ties by `tie` position.
  auto by_score = [](std::vector<std::size_t>& items, const std::vector<double>& score,
                     const std::vector<std::size_t>& tie) {
    std::stable_sort(items.begin(), items.end(), [&](std::size_t x, std::size_t y) {
      if (score[x] != score[y]) return score[x] > score[y];
      return tie[x] < tie[y];
    });
  };

  std::vector<double> score(n, 0.0);
  if (n <= kExactRankLimit) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) score[i] += cmp(i, j);
    std::vector<std::size_t> order = baseline;
    by_score(order, score, pos);
    if (comparisons) *comparisons = count;
    return order;
  }

  std::vector<std::size_t> pivots;
  for (std::size_t q : {std::size_t{0}, n / 3, 2 * n / 3, n - 1}) {
    std::size_t p = baseline[q];
    if (std::find(pivots.begin(), pivots.end(), p) == pivots.end()) pivots.push_back(p);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t p : pivots)
      if (p != i) score[i] += cmp(i, p);
  std::vector<std::size_t> first = baseline;
  by_score(first, score, pos);

  std::vector<std::size_t> firstPos(n);
  for (std::size_t r = 0; r < n; ++r) firstPos[first[r]] = r;
  std::vector<std::size_t> top(first.begin(), first.begin() + kSecondRound);
  std::vector<double> second(n, 0.0);
  for (std::size_t i : top)
    for (std::size_t j : top)
      if (i != j) second[i] += cmp(i, j);
  by_score(top, second, firstPos);
  std::copy(top.begin(), top.end(), first.begin());
  if (comparisons) *comparisons = count;
  return first;
}

std::vector<std::size_t> rank_model(const ClassModel& m, const Choice& c, const std::vector<Candidate>& cands,
                                    FeatureCache* cache, std::size_t* comparisons) {
  std::vector<EdgeTarget> targets;
  targets.reserve(cands.size());
  for (const Candidate& cd : cands) targets.push_back({cd.target, cd.priority});
  auto rows = sibling_features(m.specs, *c.aut, c.source, targets, cache);
  return rank_pairwise(m, rows, rank_baseline(c, cands), comparisons);
}

std::vector<std::size_t> ModelHeuristic::rank(const Choice& c, const std::vector<Candidate>& cands) {
  StateClass cls = classify_state(*c.aut, c.source, c.owner);
  const auto& cm = model_->classes[cls.index()];
  if (!cm || cands.size() < 2) return rank_baseline(c, cands);
  return rank_model(*cm, c, cands, &cache_);
}

nlohmann::json PairModel::to_json() const {
  nlohmann::json j;
  j["version"] = 1;
  j["classes"] = nlohmann::json::object();
  for (int i = 0; i < kNumStateClasses; ++i) {
    if (!classes[i]) continue;
    const ClassModel& cm = *classes[i];
    nlohmann::json c;
    c["featureSpecs"] = nlohmann::json::array();
    for (const auto& s : cm.specs) c["featureSpecs"].push_back(s.name());
    c["trees"] = nlohmann::json::array();
    for (const Tree& t : cm.trees) {
      nlohmann::json tj;
      tj["splits"] = nlohmann::json::array();
      for (const auto& s : t.splits)
        tj["splits"].push_back(
            {{"featureIndex", s.featureIndex}, {"threshold", s.threshold}, {"left", s.left}, {"right", s.right}});
      tj["leaves"] = t.leaves;
      c["trees"].push_back(std::move(tj));
    }
    c["baseScore"] = cm.baseScore;
    j["classes"][kClassNames[i]] = std::move(c);
  }
  j["trainingMeta"] = trainingMeta;
  return j;
}

PairModel PairModel::from_json(const nlohmann::json& j) {
  try {
    return from_json_unchecked(j);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("invalid model: ") + e.what());
  }
}

PairModel PairModel::from_json_unchecked(const nlohmann::json& j) {
  auto bad = [](const std::string& why) { throw std::invalid_argument("invalid model: " + why); };
  if (!j.is_object() || j.value("version", 0) != 1) bad("missing or unsupported version");
  if (!j.contains("classes") || !j["classes"].is_object()) bad("missing classes");
  PairModel m;
  for (const auto& [name, c] : j["classes"].items()) {
    auto cls = StateClass::parse(name);
    if (!cls) bad("unknown class " + name);
    ClassModel cm;
    for (const auto& s : c.at("featureSpecs")) cm.specs.push_back(FeatureSpec::parse(s.get<std::string>()));
    const std::size_t width = 3 * cm.specs.size();
    for (const auto& tj : c.at("trees")) {
      Tree t;
      for (const auto& sj : tj.at("splits"))
        t.splits.push_back({sj.at("featureIndex").get<std::uint32_t>(), sj.at("threshold").get<double>(),
                            sj.at("left").get<std::int32_t>(), sj.at("right").get<std::int32_t>()});
      t.leaves = tj.at("leaves").get<std::vector<double>>();
      auto okChild = [&](std::int32_t ch) {
        return ch >= 0 ? static_cast<std::size_t>(ch) < t.splits.size()
                       : static_cast<std::size_t>(-ch - 1) < t.leaves.size();
      };
      for (const auto& s : t.splits)
        if (s.featureIndex >= width || !okChild(s.left) || !okChild(s.right)) bad("malformed tree in " + name);
      cm.trees.push_back(std::move(t));
    }
    cm.baseScore = c.value("baseScore", 0.0);
    m.classes[cls->index()] = std::move(cm);
  }
  if (j.contains("trainingMeta")) m.trainingMeta = j["trainingMeta"];
  return m;
}

void PairModel::save(std::ostream& out) const { out << to_json().dump(1) << '\n'; }

PairModel PairModel::load(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("invalid model: ") + e.what());
  }
  return from_json(j);
}

PairModel PairModel::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open model file " + path);
  return load(in);
}

}  // namespace semsyn
