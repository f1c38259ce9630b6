// search.hpp -- SAT-based certificate synthesis with counterexample-guided
// refinement. The encoding fixes an n-state automaton by transition and
// accepting variables, ties interpretation variables to them by
// bi-implication (so any model's interpretation values are exact), and
// constrains: quasi-model over all singleton assignments, one accepted
// witness term, and a growing list of rejected terms. Redex containment is
// enforced outside the encoding: each failed inclusion check contributes its
// counterexample as a new rejected term.

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nonterm/certificate.hpp"
#include "nonterm/sat.hpp"
#include "nonterm/term.hpp"
#include "nonterm/tree_automaton.hpp"

namespace nonterm {

struct SearchConfig {
  int max_states = 6;
  int witness_depth = 6;
  int witness_pool_size = 64;
  int max_refinements = 200;
  std::optional<double> timeout_seconds;
};

/// Deterministic variable numbering: transition variables first (symbols in
/// signature order, argument tuples in lexicographic order, targets fastest),
/// then the accepting variables; interpretation/auxiliary variables follow.
class VarLayout {
 public:
  VarLayout(const Signature& sig, std::uint32_t num_states);

  sat::Lit transition_var(SymbolId f, const std::vector<State>& args, State target) const;
  sat::Lit accepting_var(State q) const;
  int base_vars() const { return base_vars_; }
  std::uint32_t num_states() const { return num_states_; }

 private:
  std::uint32_t num_states_;
  std::vector<std::uint64_t> symbol_offset_;
  std::uint64_t accepting_offset_ = 0;
  int base_vars_;
};

/// One encoded (subterm, assignment) pair; `binding` is restricted to the
/// subterm's variables. y[q] is the literal asserting q ∈ [[term]]binding.
struct TermInstance {
  TermPtr term;
  std::vector<std::pair<std::string, State>> binding;
  std::vector<sat::Lit> y;
};

struct CertificateEncoding {
  sat::Cnf cnf;
  VarLayout layout;
  std::vector<TermInstance> instances;
};

CertificateEncoding encode_certificate_constraints(const Trs& trs, int num_states,
                                                   const TermPtr& witness,
                                                   const std::vector<TermPtr>& rejected);

/// Reads the fixed layout back from a model.
TreeAutomaton decode_model(const std::vector<bool>& model, int num_states,
                           const Signature& sig);

/// Streams ground terms in canonical order: node count ascending, then root
/// symbol by signature index, then children lexicographically (same order).
class TermEnumerator {
 public:
  TermEnumerator(Signature sig, int max_depth);
  /// Next term, or nullopt once all terms of depth <= max_depth are spent.
  std::optional<TermPtr> next();

 private:
  const std::vector<TermPtr>& terms_of(std::uint32_t size, int depth);

  Signature sig_;
  int max_depth_;
  std::uint64_t max_size_;
  std::uint32_t current_size_ = 1;
  std::size_t index_ = 0;
  // [depth][size], absent = not yet computed
  std::vector<std::vector<std::optional<std::vector<TermPtr>>>> memo_;
};

/// First `count` terms of the enumeration; requires a constant in the
/// signature (there are no ground terms otherwise).
std::vector<TermPtr> enumerate_ground_terms(const Signature& sig, int depth,
                                            std::size_t count);

enum class SearchStatus { found, exhausted, timed_out, solver_failed };

struct SearchStats {
  int witnesses_tried = 0;
  int solver_calls = 0;
  int refinements = 0;
  int max_states_reached = 0;
};

struct SearchOutcome {
  SearchStatus status = SearchStatus::exhausted;
  std::optional<Certificate> certificate;
  SearchStats stats;
};

/// CEGAR search: states ascending, then witnesses in pool order; every
/// returned certificate has already passed verify_certificate.
SearchOutcome search_certificate(const Trs& trs, const SearchConfig& config = {},
                                 sat::Solver* solver = nullptr);

/// Test hook: as above with a replaceable model decoder, used to show that a
/// corrupted decoder cannot make the search return an unverified certificate.
using ModelDecoder =
    std::function<TreeAutomaton(const std::vector<bool>&, int, const Signature&)>;
SearchOutcome search_certificate_with_decoder(const Trs& trs, const SearchConfig& config,
                                              sat::Solver* solver,
                                              const ModelDecoder& decoder);

}  // namespace nonterm
