// Property suites shared by the unit tests and the acceptance runner. Each
// suite returns a list of failure descriptions; empty means the property
// held everywhere it was checked.

#pragma once

#include <random>
#include <string>
#include <vector>

#include "nonterm/certificate.hpp"
#include "nonterm/sat.hpp"
#include "nonterm/term.hpp"
#include "nonterm/tree_automaton.hpp"

namespace properties {

using namespace nonterm;

using Failures = std::vector<std::string>;

Signature small_signature();  // {c/0, f/1, g/2}

TreeAutomaton random_automaton(const Signature& sig, std::uint32_t num_states,
                               std::mt19937& rng, double density);
TreeAutomaton random_deterministic_complete(const Signature& sig,
                                            std::uint32_t num_states,
                                            std::mt19937& rng);

/// Lemma-style agreement: quasi-model checked over singleton assignments
/// coincides with the check over all power-set assignments, on exhaustive
/// small instances (|Q| <= 3, rules with <= 2 variables).
Failures lemma15_agreement_suite(int instances);

/// If the automaton is a quasi-model, every one-step reduct (by the
/// position-indexed oracle) of every accepted enumerated term is accepted.
Failures closure_suite(const TreeAutomaton& a, const Trs& trs,
                       const std::vector<TermPtr>& terms, const char* label);

/// Product semantics on enumerated terms: [[t]]_{A.B} = [[t]]_A x [[t]]_B,
/// and reachable product pairs are exactly the realized interpretation pairs.
Failures product_semantics_suite(int instances, int depth);

/// check_inclusion against the enumeration oracle on random instances:
/// counterexamples are exact, "holds" is cross-checked to the given depth.
Failures inclusion_oracle_suite(int instances, int depth);

/// Every model of the encoding assigns the interpretation variables their
/// true values in the decoded automaton, and the decoded automaton is a
/// quasi-model accepting the witness and rejecting the rejected terms.
Failures encoding_fidelity_suite(const Trs& trs, int num_states, const TermPtr& witness,
                                 const std::vector<TermPtr>& rejected,
                                 sat::Solver& solver);

/// Every single mutation of the certificate (drop one transition, drop one
/// accepting state, add one rule) either flips a verifier check or leaves a
/// certificate that still passes a desk-scale genuine-validity audit
/// (evidence generation plus redex/closure on enumerated accepted terms).
Failures mutation_suite(const Trs& trs, const Certificate& certificate,
                        const Rule& extra_rule, int audit_depth, const char* label);

}  // namespace properties
