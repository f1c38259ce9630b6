// Independent oracles for the property suites: exhaustive ground-term
// enumeration, naive run-based acceptance, and position-indexed rewriting.
// These deliberately re-derive results from the definitions instead of
// calling the code paths they are used to check.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "nonterm/term.hpp"
#include "nonterm/tree_automaton.hpp"

namespace oracles {

using namespace nonterm;

/// All ground terms of depth <= max_depth, sharing subterm nodes.
std::vector<TermPtr> enumerate_all_terms(const Signature& sig, int max_depth);

/// All words over the alphabet with length <= max_len.
std::vector<std::vector<std::string>> enumerate_words(
    const std::vector<std::string>& alphabet, int max_len);

/// Acceptance by explicit enumeration of bottom-up runs (no state sets).
bool oracle_accepts(const TermPtr& t, const TreeAutomaton& a);

/// One-step reducts computed via explicit position lists and subterm
/// replacement.
std::vector<TermPtr> oracle_reducts(const TermPtr& t, const Trs& trs);

/// Memoized per-node acceptance for large shared-term enumerations; the
/// memo key is the node pointer, so terms must come from a sharing
/// enumerator such as enumerate_all_terms.
class MemoAcceptance {
 public:
  explicit MemoAcceptance(const TreeAutomaton& a) : a_(a) {}
  bool accepts(const TermPtr& t);
  const StateSet& states(const TermPtr& t);

 private:
  const TreeAutomaton& a_;
  std::map<const Term*, StateSet> memo_;
};

/// Memoized per-node redex containment via match_pattern only.
class MemoRedex {
 public:
  explicit MemoRedex(const Trs& trs) : trs_(trs) {}
  bool contains(const TermPtr& t);

 private:
  const Trs& trs_;
  std::map<const Term*, bool> memo_;
};

}  // namespace oracles
