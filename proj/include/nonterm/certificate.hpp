// certificate.hpp -- non-termination certificates and their verification.
//
// A certificate for a system R is a tree automaton A; it proves R
// non-terminating when (1) L(A) is non-empty, (2) A is a quasi-model for R
// (so L(A) is closed under rewriting), and (3) every member of L(A)
// contains a redex, checked as L(A) <= L(B) for the redex automaton B.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "nonterm/quasi_model.hpp"
#include "nonterm/term.hpp"
#include "nonterm/tree_automaton.hpp"

namespace nonterm {

enum class Provenance { hand_written, searched };

struct CertificateProvenance {
  Provenance kind = Provenance::hand_written;
  std::string note;
};

struct Certificate {
  TreeAutomaton automaton;
  /// SHA-256 (hex) of the canonically pretty-printed system it certifies.
  std::string system_hash;
  CertificateProvenance provenance;
};

enum class VerdictStatus { nonterminating, invalid };

struct RedexInclusionCheck {
  bool passed = false;
  std::optional<TermPtr> counterexample;
};

struct Verdict {
  VerdictStatus status = VerdictStatus::invalid;
  bool nonempty = false;
  QuasiModelReport quasi_model;
  RedexInclusionCheck redex_inclusion;
};

/// Runs the three checks; status is NONTERMINATING iff all pass. All checks
/// always run (the report shows each one). Throws std::invalid_argument on
/// signature mismatch or a non-left-linear system.
Verdict verify_certificate(const Trs& trs, const Certificate& certificate);

/// A reduction t0 -> t1 -> ... -> tk with every ti accepted: t0 is the least
/// accepted term, each step takes the first accepted reduct in
/// leftmost-innermost order. Requires a certificate that verified as
/// NONTERMINATING; any failure here indicates a verifier bug and throws
/// std::logic_error.
std::vector<TermPtr> emit_reduction_evidence(const Trs& trs,
                                             const Certificate& certificate,
                                             std::size_t steps);

struct CodecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string encode_certificate(const Certificate& certificate);
Certificate decode_certificate(std::string_view text);

/// SHA-256 hex digest of pretty_print(trs).
std::string system_hash(const Trs& trs);

std::string sha256_hex(std::string_view data);

}  // namespace nonterm
