#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "semsyn/formula.hpp"
#include "semsyn/letter.hpp"

namespace semsyn {

enum class AtomKind : std::uint8_t { Safety, CoSafety, GSuffix, FSuffix };

const char* atom_kind_name(AtomKind k);

/// A maximal classifiable subformula. For suffix atoms `body` is psi in
/// G psi / F psi; for finite atoms it equals `root`.
struct Atom {
  AtomKind kind;
  Formula root;
  Formula body;
  PropId placeholder;

  bool omega() const { return kind == AtomKind::GSuffix || kind == AtomKind::FSuffix; }
};

/// Monotone Boolean skeleton over atom placeholders ("#0", "#1", ...).
struct Decomposition {
  Formula skeleton;
  std::vector<Atom> atoms;
};

/// Splits f into atoms, applying G-over-and, F-over-or and prefix-independence
/// rewrites first. Throws UnsupportedError outside the fragment.
Decomposition decompose(Formula f);

bool is_syntactic_safety(Formula f);
bool is_syntactic_cosafety(Formula f);

/// Progress of one live atom. Finite atoms use only `cur`. Suffix atoms run a
/// breakpoint construction: `cur` is the current batch of obligations (tt for
/// an empty G batch, ff for an empty F batch), `pend` the next batch.
struct Slot {
  std::uint32_t atom;
  Formula cur;
  Formula pend;
  bool operator==(const Slot&) const = default;
};

struct AutState {
  Formula skeleton;
  std::vector<Slot> slots;         // sorted by atom
  std::vector<std::uint8_t> rr;    // per pair: index into its good atoms
  std::vector<std::uint8_t> iar;   // permutation of pair ids, front first
  bool operator==(const AutState&) const = default;
};

/// Generalized Rabin pair: every good atom fires infinitely often and every
/// bad atom restarts only finitely often. Masks are over atom indices.
struct RabinPair {
  std::uint64_t good = 0;
  std::uint64_t bad = 0;
  std::vector<std::uint32_t> goods;
};

struct StepEvents {
  std::vector<char> good;  // per pair of the source state
  std::vector<char> bad;
  std::vector<std::uint32_t> fired;      // G atoms that completed a batch
  std::vector<std::uint32_t> restarted;  // F atoms whose batch failed
  std::vector<std::pair<std::uint32_t, bool>> decided;
  /// Per atom of the source state: progress right after af, before any reset.
  std::vector<std::pair<std::uint32_t, Formula>> raw;
  bool skeletonChanged = false;
};

using StateId = std::uint32_t;

struct Transition {
  StateId target;
  std::uint32_t priority;
};

/// min-parity record update. `bad`/`good` are indexed by pair id, `iar`
/// lists pair ids front first. Returns the emitted priority.
std::uint32_t iar_step(std::vector<std::uint8_t>& iar, const std::vector<char>& good, const std::vector<char>& bad);

/// On-demand deterministic parity automaton with min-parity edge priorities.
/// Not thread-safe; one instance serves one solve.
class Automaton {
 public:
  Automaton(Formula f, Partition p);

  const Decomposition& decomposition() const { return dec_; }
  const Partition& partition() const { return part_; }
  Formula formula() const { return formula_; }

  StateId initial() const { return 0; }
  std::size_t num_states() const { return states_.size(); }
  const AutState& state(StateId s) const { return states_[s]; }

  bool is_terminal(StateId s) const { return states_[s].skeleton.is_const(); }
  std::size_t num_letters() const { return std::size_t{1} << part_.width(); }

  /// Successor under letter index envMask | sysMask << num_env(); cached.
  Transition successor(StateId s, std::uint64_t letter);
  /// Uncached successor under an arbitrary valuation, reporting events.
  Transition step(StateId s, const Letter& l, StepEvents* events = nullptr);

  const std::vector<RabinPair>& pairs(StateId s);
  std::size_t live_pairs(StateId s) { return pairs(s).size(); }

  /// Label formula: skeleton with finite atoms replaced by their progress and
  /// suffix atoms by their root formula.
  Formula master(StateId s) const;
  /// Per live atom: the sub-goal reading of its progress.
  std::vector<std::pair<std::uint32_t, Formula>> progress(StateId s) const;
  Formula progress_label(const Slot& slot) const;

  std::uint64_t letter_index(const Letter& l) const;

 private:
  StateId intern(AutState st);
  const std::vector<RabinPair>& pairs_of(Formula skeleton);

  Formula formula_;
  Partition part_;
  Decomposition dec_;
  std::unordered_map<PropId, std::uint32_t> atomOf_;
  std::vector<AutState> states_;
  std::unordered_map<std::uint64_t, std::vector<StateId>> index_;
  std::vector<std::uint64_t> relevant_;
  std::vector<std::unordered_map<std::uint64_t, Transition>> cache_;
  std::unordered_map<Formula, std::unique_ptr<std::vector<RabinPair>>, FormulaHash> pairCache_;
};

/// Runs the automaton for f on the lasso and reports acceptance.
bool accepts_lasso(Formula f, const LassoWord& w);
bool accepts_lasso(Automaton& a, const LassoWord& w);

/// Reachable automaton in HOA-like text and in DOT (debug output).
void write_hoa(Automaton& a, std::ostream& out, std::size_t maxStates = 10000);
void write_aut_dot(Automaton& a, std::ostream& out, std::size_t maxStates = 10000);

}  // namespace semsyn
