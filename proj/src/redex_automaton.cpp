#include "nonterm/redex_automaton.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace nonterm {

namespace {

constexpr const char* kWildcard = "_";

// Patterns are compared modulo variable renaming; with left-linear input it
// is sound to collapse every variable to one wildcard.
TermPtr canonicalize(const TermPtr& t) {
  if (t->is_variable()) return Term::var(kWildcard);
  std::vector<TermPtr> children;
  children.reserve(t->children().size());
  for (const TermPtr& c : t->children()) children.push_back(canonicalize(c));
  return Term::app(t->head(), std::move(children));
}

struct Pattern {
  SymbolId head;
  // For each argument: the pattern index of a non-variable child, or nullopt
  // for a wildcard position.
  std::vector<std::optional<std::size_t>> child_patterns;
  bool is_full_lhs = false;
};

using MatchedSet = std::uint64_t;  // bit i set <=> pattern i matched

}  // namespace

TreeAutomaton build_redex_automaton(const Trs& trs) {
  if (!is_left_linear(trs)) {
    throw std::invalid_argument(
        "redex automaton construction requires a left-linear system");
  }
  const Signature& sig = trs.signature();

  if (!sig.has_constant()) {
    // No ground terms at all; one dead state keeps the automaton complete.
    TreeAutomaton out(sig, 1);
    for (SymbolId f = 0; f < sig.size(); ++f) {
      out.add_transition(f, std::vector<State>(sig[f].arity, 0), 0);
    }
    return out;
  }

  // Canonical non-variable lhs subterms, innermost first so child patterns
  // are indexed before their parents.
  std::vector<Pattern> patterns;
  std::unordered_map<TermPtr, std::size_t, TermPtrHash, TermPtrEq> pattern_index;
  auto intern = [&](auto&& self, const TermPtr& t) -> std::size_t {
    TermPtr canon = canonicalize(t);
    auto it = pattern_index.find(canon);
    if (it != pattern_index.end()) return it->second;
    Pattern p;
    p.head = sig.require(t->head());
    for (const TermPtr& c : t->children()) {
      if (c->is_variable()) {
        p.child_patterns.emplace_back(std::nullopt);
      } else {
        p.child_patterns.emplace_back(self(self, c));
      }
    }
    std::size_t index = patterns.size();
    patterns.push_back(std::move(p));
    pattern_index.emplace(std::move(canon), index);
    return index;
  };
  for (const Rule& rule : trs.rules()) {
    std::size_t index = intern(intern, rule.lhs);
    patterns[index].is_full_lhs = true;
  }
  if (patterns.size() >= 64) {
    throw std::invalid_argument("too many distinct left-hand-side subterms");
  }

  MatchedSet full_lhs_mask = 0;
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    if (patterns[i].is_full_lhs) full_lhs_mask |= MatchedSet{1} << i;
  }

  // States in creation order: redex-free matched sets plus one absorbing
  // accept state, allocated on demand. Ids never move once handed out.
  std::map<MatchedSet, State> state_of;
  std::vector<std::optional<MatchedSet>> state_matched;  // nullopt = accept state
  std::optional<State> top;

  auto get_top = [&]() -> State {
    if (!top) {
      top = static_cast<State>(state_matched.size());
      state_matched.emplace_back(std::nullopt);
    }
    return *top;
  };

  auto target_for = [&](SymbolId f, const std::vector<State>& args) -> State {
    MatchedSet matched = 0;
    for (State q : args) {
      if (!state_matched[q]) return get_top();  // child already saw a redex
    }
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      const Pattern& p = patterns[i];
      if (p.head != f) continue;
      bool all = true;
      for (std::size_t j = 0; j < p.child_patterns.size(); ++j) {
        if (!p.child_patterns[j]) continue;  // wildcard position
        if (!(*state_matched[args[j]] & (MatchedSet{1} << *p.child_patterns[j]))) {
          all = false;
          break;
        }
      }
      if (all) matched |= MatchedSet{1} << i;
    }
    if (matched & full_lhs_mask) return get_top();
    auto it = state_of.find(matched);
    if (it != state_of.end()) return it->second;
    State q = static_cast<State>(state_matched.size());
    state_of.emplace(matched, q);
    state_matched.emplace_back(matched);
    return q;
  };

  // Closure over all argument tuples; a tuple is new iff it mentions a state
  // created after the previous sweep for its symbol.
  std::vector<std::vector<std::pair<std::vector<State>, State>>> table(sig.size());
  std::vector<State> swept(sig.size(), 0);
  bool grew = true;
  while (grew) {
    grew = false;
    const State n = static_cast<State>(state_matched.size());
    for (SymbolId f = 0; f < sig.size(); ++f) {
      const std::uint32_t arity = sig[f].arity;
      if (arity == 0) {
        if (table[f].empty()) {
          State t = target_for(f, {});
          table[f].push_back({{}, t});
        }
      } else if (n > 0) {
        std::vector<State> tuple(arity, 0);
        for (;;) {
          bool fresh = false;
          for (State q : tuple) {
            if (q >= swept[f]) {
              fresh = true;
              break;
            }
          }
          if (fresh) {
            State t = target_for(f, tuple);
            table[f].push_back({tuple, t});
          }
          std::size_t i = arity;
          while (i > 0 && ++tuple[i - 1] == n) {
            tuple[i - 1] = 0;
            --i;
          }
          if (i == 0) break;
        }
      }
      swept[f] = n;
    }
    if (state_matched.size() > n) grew = true;
  }

  TreeAutomaton out(sig, static_cast<std::uint32_t>(state_matched.size()));
  if (top) out.set_accepting(*top);
  for (SymbolId f = 0; f < sig.size(); ++f) {
    for (auto& [args, tgt] : table[f]) out.add_transition(f, args, tgt);
  }
  return out;
}

}  // namespace nonterm
