// parser.hpp -- TPDB-style .trs/.srs input, the word embedding, and printing.
//
// TRS grammar (whitespace-insensitive except that rules are separated by a
// comma or a newline):
//
//   file    := section*
//   section := '(' 'SIG' ('(' ident nat ')')* ')'
//            | '(' 'VAR' ident* ')'
//            | '(' 'RULES' rule (( ',' | NEWLINE ) rule)* ')'
//            | '(' 'COMMENT' ... ')'            -- ignored
//   rule    := term '->' term
//   term    := atom+                -- 2+ atoms associate left via binary "ap"
//   atom    := ident [ '(' term (',' term)* ')' ]   -- '(' must be adjacent
//            | '(' term ')'
//
// SRS rules are comma/newline separated words of single-character letters;
// whitespace between letters is optional ("zL -> Lz" == "z L -> L z"). An
// empty side denotes the empty word. Words embed as nested unary symbols
// around a fresh variable, ground words end in the reserved constant ε.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nonterm/term.hpp"

namespace nonterm {

struct ParseError : std::runtime_error {
  ParseError(const std::string& message, int line, int column)
      : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                           std::to_string(column) + ": " + message),
        line(line),
        column(column) {}
  int line;
  int column;
};

enum class InputFormat { trs, srs };

Trs parse_trs(std::string_view text, InputFormat format);

struct WordRule {
  std::vector<std::string> lhs;
  std::vector<std::string> rhs;
};

/// Embeds word rules as a term system: letters become unary symbols, a word
/// a1...an becomes a1(...an(x)...) around a fresh variable, and the signature
/// gains the end-marker constant ε.
Trs embed_srs(const std::vector<WordRule>& rules);

/// Name of the end-marker constant added by the srs embedding.
const std::string& srs_end_marker();

/// Ground term for a word: b z b  ->  b(z(b(ε))).
TermPtr word_to_term(const std::vector<std::string>& letters);
/// Inverse of word_to_term; nullopt if the term is not a unary chain ending
/// in the end marker.
std::optional<std::vector<std::string>> term_to_word(const TermPtr& t);

/// Canonical, reparseable form: SIG + VAR + RULES sections, one rule per
/// line, terms in prefix notation. Input to the certificate system hash.
std::string pretty_print(const Trs& trs);

/// Terms of string systems print as words; everything else in prefix form.
std::string display_term(const TermPtr& t, const Trs& trs);

}  // namespace nonterm
