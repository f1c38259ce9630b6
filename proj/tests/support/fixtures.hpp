// Shared test fixtures: the two regression systems and their hand-built
// automata (the string system with certificate A_LR, the S combinator rule
// with certificate A_S and redex automaton C).

#pragma once

#include <string>

#include "nonterm/certificate.hpp"
#include "nonterm/parser.hpp"
#include "nonterm/tree_automaton.hpp"

namespace fixtures {

using namespace nonterm;

inline const std::string kLrSource =
    "(RULES zL -> Lz, Rz -> zR, bL -> bR, Rb -> Lzb)";
inline const std::string kSSource = "(VAR x y z)(RULES S x y z -> x z (y z))";
inline const std::string kSizeDecreasingSource = "(RULES a -> )";

inline Trs lr_system() { return parse_trs(kLrSource, InputFormat::srs); }
inline Trs s_system() { return parse_trs(kSSource, InputFormat::trs); }
inline Trs size_decreasing_system() {
  return parse_trs(kSizeDecreasingSource, InputFormat::srs);
}

/// Q = {0,1,2,3}, F = {3}; accepts the words b z* (L|R) z* b.
inline TreeAutomaton a_lr() {
  TreeAutomaton a(lr_system().signature(), 4);
  a.add_transition(srs_end_marker(), {}, 0);
  a.add_transition("b", {0}, 1);
  a.add_transition("z", {1}, 1);
  a.add_transition("L", {1}, 2);
  a.add_transition("R", {1}, 2);
  a.add_transition("z", {2}, 2);
  a.add_transition("b", {2}, 3);
  a.set_accepting(3);
  return a;
}

/// Q = {0,1,2,3,4}, F = {4}.
inline TreeAutomaton a_s() {
  TreeAutomaton a(s_system().signature(), 5);
  a.add_transition("S", {}, 0);
  a.add_transition("ap", {0, 0}, 1);
  a.add_transition("ap", {1, 0}, 2);
  a.add_transition("ap", {0, 2}, 2);
  a.add_transition("ap", {0, 3}, 2);
  a.add_transition("ap", {2, 2}, 3);
  a.add_transition("ap", {2, 3}, 3);
  a.add_transition("ap", {3, 3}, 3);
  a.add_transition("ap", {3, 3}, 4);
  a.set_accepting(4);
  return a;
}

/// Deterministic complete automaton for "contains an S-rule redex":
/// Q = {0,1,2,3}, F = {3}; states 0..2 count the matched prefix of the
/// left-hand side along the leftmost application spine, 3 absorbs.
inline TreeAutomaton paper_c() {
  TreeAutomaton c(s_system().signature(), 4);
  c.add_transition("S", {}, 0);
  for (State q = 0; q <= 2; ++q) {
    c.add_transition("ap", {0, q}, 1);
    c.add_transition("ap", {1, q}, 2);
    c.add_transition("ap", {2, q}, 3);
    c.add_transition("ap", {3, q}, 3);
    c.add_transition("ap", {q, 3}, 3);
  }
  c.add_transition("ap", {3, 3}, 3);
  c.set_accepting(3);
  return c;
}

inline Certificate certificate_for(const Trs& trs, TreeAutomaton automaton,
                                   const std::string& note = "paper automaton") {
  return Certificate{std::move(automaton), system_hash(trs),
                     {Provenance::hand_written, note}};
}

/// S, applied: ap(a, b).
inline TermPtr ap(TermPtr a, TermPtr b) {
  return Term::app("ap", {std::move(a), std::move(b)});
}
inline TermPtr s_const() { return Term::app("S"); }
/// S S S = ap(ap(S,S),S)
inline TermPtr sss() { return ap(ap(s_const(), s_const()), s_const()); }

}  // namespace fixtures
