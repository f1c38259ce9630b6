#include "nonterm/term.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_set>

namespace nonterm {

namespace {

std::size_t hash_combine(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

SymbolId Signature::add(std::string name, std::uint32_t arity) {
  auto it = index_.find(name);
  if (it != index_.end()) {
    if (symbols_[it->second].arity != arity) {
      throw std::invalid_argument("symbol '" + name + "' used with arity " +
                                  std::to_string(arity) + " but declared with arity " +
                                  std::to_string(symbols_[it->second].arity));
    }
    return it->second;
  }
  SymbolId id = static_cast<SymbolId>(symbols_.size());
  symbols_.push_back(Symbol{name, arity});
  index_.emplace(std::move(name), id);
  return id;
}

std::optional<SymbolId> Signature::find(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SymbolId Signature::require(std::string_view name) const {
  auto id = find(name);
  if (!id) throw std::invalid_argument("unknown symbol '" + std::string(name) + "'");
  return *id;
}

bool Signature::has_constant() const {
  return std::any_of(symbols_.begin(), symbols_.end(),
                     [](const Symbol& s) { return s.arity == 0; });
}

bool Signature::same_symbols(const Signature& other) const {
  if (symbols_.size() != other.symbols_.size()) return false;
  for (const Symbol& s : symbols_) {
    auto id = other.find(s.name);
    if (!id || other[*id].arity != s.arity) return false;
  }
  return true;
}

Term::Term(bool is_variable, std::string head, std::vector<TermPtr> children)
    : is_variable_(is_variable),
      head_(std::move(head)),
      children_(std::move(children)) {
  node_count_ = 1;
  depth_ = 0;
  hash_ = hash_combine(is_variable_ ? 0x9b5d1f3u : 0x1c8f62au,
                       std::hash<std::string>{}(head_));
  for (const TermPtr& c : children_) {
    node_count_ += c->node_count();
    depth_ = std::max(depth_, c->depth() + 1);
    hash_ = hash_combine(hash_, c->hash());
  }
}

TermPtr Term::var(std::string name) {
  return TermPtr(new Term(true, std::move(name), {}));
}

TermPtr Term::app(std::string symbol, std::vector<TermPtr> children) {
  return TermPtr(new Term(false, std::move(symbol), std::move(children)));
}

bool term_equal(const Term& a, const Term& b) {
  if (&a == &b) return true;
  if (a.hash() != b.hash() || a.is_variable() != b.is_variable() ||
      a.head() != b.head() || a.children().size() != b.children().size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.children().size(); ++i) {
    if (!term_equal(*a.children()[i], *b.children()[i])) return false;
  }
  return true;
}

bool term_equal(const TermPtr& a, const TermPtr& b) {
  return a == b || term_equal(*a, *b);
}

bool term_less(const TermPtr& a, const TermPtr& b, const Signature& sig) {
  if (a->node_count() != b->node_count()) {
    return a->node_count() < b->node_count();
  }
  if (a->is_variable() != b->is_variable()) return a->is_variable();
  if (a->is_variable()) return a->head() < b->head();
  if (a->head() != b->head()) {
    auto ia = sig.find(a->head());
    auto ib = sig.find(b->head());
    if (ia && ib) return *ia < *ib;
    return a->head() < b->head();
  }
  for (std::size_t i = 0; i < a->children().size(); ++i) {
    if (!term_equal(a->children()[i], b->children()[i])) {
      return term_less(a->children()[i], b->children()[i], sig);
    }
  }
  return false;
}

static void to_string_rec(const Term& t, std::string& out) {
  out += t.head();
  if (!t.children().empty()) {
    out += '(';
    bool first = true;
    for (const TermPtr& c : t.children()) {
      if (!first) out += ',';
      first = false;
      to_string_rec(*c, out);
    }
    out += ')';
  }
}

std::string to_string(const Term& t) {
  std::string out;
  to_string_rec(t, out);
  return out;
}

std::string to_string(const TermPtr& t) { return to_string(*t); }

static void collect_variables(const TermPtr& t, std::vector<std::string>& out,
                              std::set<std::string>& seen) {
  if (t->is_variable()) {
    if (seen.insert(t->head()).second) out.push_back(t->head());
    return;
  }
  for (const TermPtr& c : t->children()) collect_variables(c, out, seen);
}

std::vector<std::string> variables_of(const TermPtr& t) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  collect_variables(t, out, seen);
  return out;
}

bool is_ground(const TermPtr& t) {
  if (t->is_variable()) return false;
  return std::all_of(t->children().begin(), t->children().end(), is_ground);
}

static bool is_linear_rec(const TermPtr& t, std::set<std::string>& seen) {
  if (t->is_variable()) return seen.insert(t->head()).second;
  for (const TermPtr& c : t->children()) {
    if (!is_linear_rec(c, seen)) return false;
  }
  return true;
}

bool is_linear(const TermPtr& t) {
  std::set<std::string> seen;
  return is_linear_rec(t, seen);
}

static bool match_rec(const TermPtr& pattern, const TermPtr& subject,
                      Substitution& sigma) {
  if (pattern->is_variable()) {
    auto [it, inserted] = sigma.emplace(pattern->head(), subject);
    return inserted || term_equal(it->second, subject);
  }
  if (subject->is_variable() || pattern->head() != subject->head() ||
      pattern->children().size() != subject->children().size()) {
    return false;
  }
  for (std::size_t i = 0; i < pattern->children().size(); ++i) {
    if (!match_rec(pattern->children()[i], subject->children()[i], sigma)) {
      return false;
    }
  }
  return true;
}

std::optional<Substitution> match_pattern(const TermPtr& pattern,
                                          const TermPtr& subject) {
  Substitution sigma;
  if (!match_rec(pattern, subject, sigma)) return std::nullopt;
  return sigma;
}

TermPtr apply_substitution(const TermPtr& t, const Substitution& sigma) {
  if (t->is_variable()) {
    auto it = sigma.find(t->head());
    if (it == sigma.end()) {
      throw std::invalid_argument("unbound variable '" + t->head() +
                                  "' in substitution");
    }
    return it->second;
  }
  if (t->children().empty()) return t;
  std::vector<TermPtr> children;
  children.reserve(t->children().size());
  bool changed = false;
  for (const TermPtr& c : t->children()) {
    TermPtr nc = apply_substitution(c, sigma);
    changed = changed || nc != c;
    children.push_back(std::move(nc));
  }
  if (!changed) return t;
  return Term::app(t->head(), std::move(children));
}

static void validate_term(const TermPtr& t, const Signature& sig) {
  if (t->is_variable()) return;
  SymbolId id = sig.require(t->head());
  if (sig[id].arity != t->children().size()) {
    throw std::invalid_argument("symbol '" + t->head() + "' expects " +
                                std::to_string(sig[id].arity) + " arguments, got " +
                                std::to_string(t->children().size()));
  }
  for (const TermPtr& c : t->children()) validate_term(c, sig);
}

Trs::Trs(Signature signature, std::vector<Rule> rules, SystemOrigin origin)
    : signature_(std::move(signature)), rules_(std::move(rules)), origin_(origin) {
  for (const Rule& r : rules_) {
    if (r.lhs->is_variable()) {
      throw std::invalid_argument("rule left-hand side may not be a variable");
    }
    validate_term(r.lhs, signature_);
    validate_term(r.rhs, signature_);
    std::vector<std::string> lv = variables_of(r.lhs);
    for (const std::string& v : variables_of(r.rhs)) {
      if (std::find(lv.begin(), lv.end(), v) == lv.end()) {
        throw std::invalid_argument("variable '" + v +
                                    "' occurs in rhs but not in lhs of rule " +
                                    to_string(r.lhs) + " -> " + to_string(r.rhs));
      }
    }
  }
}

bool is_left_linear(const Trs& trs) {
  return std::all_of(trs.rules().begin(), trs.rules().end(),
                     [](const Rule& r) { return is_linear(r.lhs); });
}

namespace {

// Post-order rewriting: innermost positions first, children left to right.
// `rebuild` reconstructs the whole term around the rewritten position.
void reducts_rec(const TermPtr& t, const Trs& trs,
                 const std::function<TermPtr(TermPtr)>& rebuild,
                 std::vector<TermPtr>& out) {
  for (std::size_t i = 0; i < t->children().size(); ++i) {
    auto wrap = [&, i](TermPtr replaced) {
      std::vector<TermPtr> children = t->children();
      children[i] = std::move(replaced);
      return rebuild(Term::app(t->head(), std::move(children)));
    };
    reducts_rec(t->children()[i], trs, wrap, out);
  }
  for (const Rule& rule : trs.rules()) {
    if (auto sigma = match_pattern(rule.lhs, t)) {
      out.push_back(rebuild(apply_substitution(rule.rhs, *sigma)));
    }
  }
}

}  // namespace

std::vector<TermPtr> one_step_reducts(const TermPtr& t, const Trs& trs) {
  std::vector<TermPtr> all;
  reducts_rec(t, trs, [](TermPtr s) { return s; }, all);
  std::vector<TermPtr> out;
  std::unordered_set<TermPtr, TermPtrHash, TermPtrEq> seen;
  for (TermPtr& s : all) {
    if (seen.insert(s).second) out.push_back(std::move(s));
  }
  return out;
}

bool contains_redex(const TermPtr& t, const Trs& trs) {
  for (const Rule& rule : trs.rules()) {
    if (match_pattern(rule.lhs, t)) return true;
  }
  return std::any_of(t->children().begin(), t->children().end(),
                     [&](const TermPtr& c) { return contains_redex(c, trs); });
}

}  // namespace nonterm
