// term.hpp -- ranked signatures, first-order terms, matching and rewriting.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nonterm {

using SymbolId = std::uint32_t;

struct Symbol {
  std::string name;
  std::uint32_t arity = 0;
};

/// A ranked signature: a list of distinct symbol names with fixed arities.
class Signature {
 public:
  Signature() = default;

  /// Registers a symbol. Re-adding with the same arity returns the existing
  /// id; a different arity is an error.
  SymbolId add(std::string name, std::uint32_t arity);

  std::optional<SymbolId> find(std::string_view name) const;
  SymbolId require(std::string_view name) const;
  const Symbol& operator[](SymbolId id) const { return symbols_.at(id); }
  std::size_t size() const { return symbols_.size(); }
  const std::vector<Symbol>& symbols() const { return symbols_; }
  bool has_constant() const;

  /// Content equality, insensitive to declaration order.
  bool same_symbols(const Signature& other) const;

 private:
  std::vector<Symbol> symbols_;
  std::map<std::string, SymbolId, std::less<>> index_;
};

class Term;
using TermPtr = std::shared_ptr<const Term>;

/// Immutable first-order term: a variable or an application f(t1,...,tn).
/// Nodes are shared; node count, depth and a structural hash are cached.
class Term {
 public:
  static TermPtr var(std::string name);
  static TermPtr app(std::string symbol, std::vector<TermPtr> children = {});

  bool is_variable() const { return is_variable_; }
  /// Variable name or function symbol, depending on the node kind.
  const std::string& head() const { return head_; }
  const std::vector<TermPtr>& children() const { return children_; }

  std::size_t node_count() const { return node_count_; }
  std::size_t depth() const { return depth_; }
  std::size_t hash() const { return hash_; }

 private:
  Term(bool is_variable, std::string head, std::vector<TermPtr> children);

  bool is_variable_;
  std::string head_;
  std::vector<TermPtr> children_;
  std::size_t node_count_;
  std::size_t depth_;
  std::size_t hash_;
};

bool term_equal(const Term& a, const Term& b);
bool term_equal(const TermPtr& a, const TermPtr& b);

/// Total order used wherever a canonical term sequence is needed:
/// node count first, then head (variables before applications, applications
/// by signature index), then children lexicographically.
bool term_less(const TermPtr& a, const TermPtr& b, const Signature& sig);

std::string to_string(const Term& t);
std::string to_string(const TermPtr& t);

struct TermPtrHash {
  std::size_t operator()(const TermPtr& t) const { return t->hash(); }
};
struct TermPtrEq {
  bool operator()(const TermPtr& a, const TermPtr& b) const {
    return term_equal(a, b);
  }
};

/// Variables in first-occurrence order, without duplicates.
std::vector<std::string> variables_of(const TermPtr& t);
bool is_ground(const TermPtr& t);
/// True iff no variable occurs twice.
bool is_linear(const TermPtr& t);

using Substitution = std::map<std::string, TermPtr>;

/// Unique sigma with pattern*sigma == subject, if any. Non-linear patterns
/// require consistent bindings.
std::optional<Substitution> match_pattern(const TermPtr& pattern,
                                          const TermPtr& subject);
TermPtr apply_substitution(const TermPtr& t, const Substitution& sigma);

struct Rule {
  TermPtr lhs;
  TermPtr rhs;
};

enum class SystemOrigin { term_system, string_system };

/// A term rewriting system; rule terms are validated against the signature
/// on construction (arity use, lhs not a variable, rhs variables in lhs).
class Trs {
 public:
  Trs(Signature signature, std::vector<Rule> rules,
      SystemOrigin origin = SystemOrigin::term_system);

  const Signature& signature() const { return signature_; }
  const std::vector<Rule>& rules() const { return rules_; }
  SystemOrigin origin() const { return origin_; }

 private:
  Signature signature_;
  std::vector<Rule> rules_;
  SystemOrigin origin_;
};

bool is_left_linear(const Trs& trs);

/// All one-step reducts of a ground term, in leftmost-innermost position
/// order (rules in index order per position), duplicates removed keeping the
/// first occurrence.
std::vector<TermPtr> one_step_reducts(const TermPtr& t, const Trs& trs);
bool contains_redex(const TermPtr& t, const Trs& trs);

}  // namespace nonterm
