#include "semsyn/letter.hpp"

#include <algorithm>
#include <stdexcept>

namespace semsyn {

void Letter::set(PropId p, bool value) {
  const std::size_t w = p / 64;
  if (w >= words_.size()) {
    if (!value) return;
    words_.resize(w + 1, 0);
  }
  const std::uint64_t bit = std::uint64_t{1} << (p % 64);
  if (value) words_[w] |= bit;
  else words_[w] &= ~bit;
}

bool Letter::operator==(const Letter& o) const {
  const std::size_t n = std::max(words_.size(), o.words_.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t a = i < words_.size() ? words_[i] : 0;
    std::uint64_t b = i < o.words_.size() ? o.words_[i] : 0;
    if (a != b) return false;
  }
  return true;
}

Partition::Partition(std::vector<PropId> env, std::vector<PropId> sys) : env_(std::move(env)), sys_(std::move(sys)) {
  for (PropId e : env_) {
    if (std::find(sys_.begin(), sys_.end(), e) != sys_.end())
      throw std::invalid_argument("proposition '" + prop_name(e) + "' is both input and output");
  }
  auto dup = [](std::vector<PropId> v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) != v.end();
  };
  if (dup(env_) || dup(sys_)) throw std::invalid_argument("duplicate proposition in partition");
}

Partition Partition::from_names(const std::vector<std::string>& env, const std::vector<std::string>& sys) {
  std::vector<PropId> e, s;
  for (const auto& n : env) e.push_back(intern_prop(n));
  for (const auto& n : sys) s.push_back(intern_prop(n));
  return Partition(std::move(e), std::move(s));
}

std::optional<Player> Partition::owner(PropId p) const {
  if (std::find(env_.begin(), env_.end(), p) != env_.end()) return Player::Env;
  if (std::find(sys_.begin(), sys_.end(), p) != sys_.end()) return Player::Sys;
  return std::nullopt;
}

Letter Partition::letter(std::uint64_t envMask, std::uint64_t sysMask) const {
  Letter l;
  for (std::size_t i = 0; i < env_.size(); ++i)
    if ((envMask >> i) & 1U) l.set(env_[i]);
  for (std::size_t i = 0; i < sys_.size(); ++i)
    if ((sysMask >> i) & 1U) l.set(sys_[i]);
  return l;
}

void Partition::check_covers(Formula f) const {
  for (PropId p : props_of(f)) {
    if (!owner(p)) throw std::invalid_argument("proposition '" + prop_name(p) + "' is neither input nor output");
  }
}

std::vector<std::string> split_names(std::string_view csv) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i <= csv.size()) {
    std::size_t j = csv.find(',', i);
    if (j == std::string_view::npos) j = csv.size();
    std::string_view part = csv.substr(i, j - i);
    while (!part.empty() && (part.front() == ' ' || part.front() == '\t')) part.remove_prefix(1);
    while (!part.empty() && (part.back() == ' ' || part.back() == '\t')) part.remove_suffix(1);
    if (!part.empty()) out.emplace_back(part);
    i = j + 1;
  }
  return out;
}

}  // namespace semsyn
