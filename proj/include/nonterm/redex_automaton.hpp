// redex_automaton.hpp -- deterministic complete automaton for the ground
// terms containing a redex of a left-linear system.

#pragma once

#include "nonterm/term.hpp"
#include "nonterm/tree_automaton.hpp"

namespace nonterm {

/// Bottom-up subset construction over the non-variable subterms of left-hand
/// sides: a state records which such patterns the current subtree
/// instantiates, plus one absorbing accept state entered as soon as a full
/// left-hand side matches anywhere. Deterministic and complete by
/// construction; only reachable states are materialized.
///
/// Throws std::invalid_argument for non-left-linear systems (their redex
/// language need not be regular).
TreeAutomaton build_redex_automaton(const Trs& trs);

}  // namespace nonterm
