#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "semsyn/formula.hpp"

namespace semsyn {

enum class Player : std::uint8_t { Env = 0, Sys = 1 };

inline Player opponent(Player p) { return p == Player::Sys ? Player::Env : Player::Sys; }
inline const char* player_name(Player p) { return p == Player::Sys ? "sys" : "env"; }

/// Valuation of propositions, stored as a bitset indexed by global PropId.
class Letter {
 public:
  bool holds(PropId p) const {
    const std::size_t w = p / 64;
    return w < words_.size() && ((words_[w] >> (p % 64)) & 1U);
  }
  void set(PropId p, bool value = true);
  bool operator==(const Letter& o) const;

 private:
  std::vector<std::uint64_t> words_;
};

/// Environment and system proposition lists, disjoint and ordered.
class Partition {
 public:
  Partition() = default;
  Partition(std::vector<PropId> env, std::vector<PropId> sys);
  static Partition from_names(const std::vector<std::string>& env, const std::vector<std::string>& sys);

  const std::vector<PropId>& env() const { return env_; }
  const std::vector<PropId>& sys() const { return sys_; }
  std::size_t num_env() const { return env_.size(); }
  std::size_t num_sys() const { return sys_.size(); }
  std::size_t width() const { return env_.size() + sys_.size(); }

  /// Owner of a proposition, or nothing if the partition does not mention it.
  std::optional<Player> owner(PropId p) const;

  /// Bit i of envMask assigns env()[i], bit j of sysMask assigns sys()[j].
  Letter letter(std::uint64_t envMask, std::uint64_t sysMask) const;
  /// Combined index envMask | sysMask << num_env().
  Letter letter(std::uint64_t index) const {
    return letter(index & ((std::uint64_t{1} << env_.size()) - 1), index >> env_.size());
  }

  /// Throws std::invalid_argument if f mentions a proposition outside the partition.
  void check_covers(Formula f) const;

 private:
  std::vector<PropId> env_;
  std::vector<PropId> sys_;
};

/// Ultimately periodic word stem . loop^omega.
struct LassoWord {
  std::vector<Letter> stem;
  std::vector<Letter> loop;
};

/// Splits "a,b , c" into trimmed nonempty names.
std::vector<std::string> split_names(std::string_view csv);

}  // namespace semsyn
