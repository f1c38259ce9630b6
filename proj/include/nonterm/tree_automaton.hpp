// tree_automaton.hpp -- bottom-up nondeterministic finite tree automata:
// interpretation, acceptance, reachability, emptiness, products, determinism
// and completeness checks, and language inclusion against a deterministic
// complete automaton.

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "nonterm/state_set.hpp"
#include "nonterm/term.hpp"

namespace nonterm {

struct Transition {
  std::vector<State> args;
  State target;

  friend bool operator==(const Transition& a, const Transition& b) {
    return a.args == b.args && a.target == b.target;
  }
  friend bool operator<(const Transition& a, const Transition& b) {
    return a.args != b.args ? a.args < b.args : a.target < b.target;
  }
};

/// Immutable once built. States are dense ids 0..n-1; per-symbol transition
/// relations are kept sorted so every traversal order is canonical.
class TreeAutomaton {
 public:
  TreeAutomaton(Signature signature, std::uint32_t num_states);

  void add_transition(std::string_view symbol, std::vector<State> args, State target);
  void add_transition(SymbolId symbol, std::vector<State> args, State target);
  void set_accepting(State q);

  const Signature& signature() const { return signature_; }
  std::uint32_t num_states() const { return num_states_; }
  const StateSet& accepting() const { return accepting_; }
  const std::vector<Transition>& transitions(SymbolId f) const {
    return transitions_.at(f);
  }
  std::size_t transition_count() const;

 private:
  Signature signature_;
  std::uint32_t num_states_;
  StateSet accepting_;
  std::vector<std::vector<Transition>> transitions_;
};

/// Bottom-up interpretation of a term: variables read from the assignment,
/// an application collects every transition target whose argument tuple is
/// componentwise contained in the children's interpretations.
StateSet interpret(const TermPtr& t, const Assignment& alpha, const TreeAutomaton& a);
inline StateSet interpret(const TermPtr& t, const TreeAutomaton& a) {
  return interpret(t, Assignment{}, a);
}

bool accepts(const TermPtr& t, const TreeAutomaton& a);

/// Least set closed under the transition rule (nullary transitions seed it).
StateSet reachable_states(const TreeAutomaton& a);

bool is_empty(const TreeAutomaton& a);

/// Product automaton per the componentwise construction; the accepting set
/// is left empty, verdicts are computed over reachable pairs by callers.
struct ProductAutomaton {
  TreeAutomaton automaton;
  /// Pair (state in A, state in B) for each product state id.
  std::vector<std::pair<State, State>> pairs;
};
ProductAutomaton product(const TreeAutomaton& a, const TreeAutomaton& b);

/// True iff every argument tuple over Q has exactly one transition target,
/// for every symbol.
bool check_deterministic_complete(const TreeAutomaton& a);

/// Adds a non-accepting sink and routes every missing tuple to it; the input
/// must be deterministic (at most one target per tuple). An already complete
/// automaton is returned unchanged.
TreeAutomaton complete_automaton(const TreeAutomaton& a);

/// For each state, the least ground term (in term_less order) that reaches
/// it, when one exists.
std::vector<std::optional<TermPtr>> minimal_witnesses(const TreeAutomaton& a);

struct InclusionResult {
  bool holds = false;
  /// Ground term accepted by A but not by B, when the inclusion fails.
  std::optional<TermPtr> counterexample;
};

/// Decides L(A) <= L(B) over reachable states of the product; B must be
/// deterministic and complete (A stays nondeterministic).
InclusionResult check_inclusion(const TreeAutomaton& a, const TreeAutomaton& b);

}  // namespace nonterm
