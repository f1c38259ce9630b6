#include "nonterm/tree_automaton.hpp"

#include <algorithm>
#include <stdexcept>

namespace nonterm {

TreeAutomaton::TreeAutomaton(Signature signature, std::uint32_t num_states)
    : signature_(std::move(signature)),
      num_states_(num_states),
      accepting_(num_states),
      transitions_(signature_.size()) {}

void TreeAutomaton::add_transition(std::string_view symbol, std::vector<State> args,
                                   State target) {
  add_transition(signature_.require(symbol), std::move(args), target);
}

void TreeAutomaton::add_transition(SymbolId symbol, std::vector<State> args,
                                   State target) {
  if (symbol >= signature_.size()) throw std::invalid_argument("symbol id out of range");
  if (args.size() != signature_[symbol].arity) {
    throw std::invalid_argument("transition for '" + signature_[symbol].name +
                                "' has tuple arity " + std::to_string(args.size()) +
                                ", symbol arity is " +
                                std::to_string(signature_[symbol].arity));
  }
  if (target >= num_states_) throw std::invalid_argument("transition target out of range");
  for (State q : args) {
    if (q >= num_states_) throw std::invalid_argument("transition argument out of range");
  }
  Transition t{std::move(args), target};
  auto& rel = transitions_[symbol];
  auto it = std::lower_bound(rel.begin(), rel.end(), t);
  if (it == rel.end() || !(*it == t)) rel.insert(it, std::move(t));
}

void TreeAutomaton::set_accepting(State q) {
  if (q >= num_states_) throw std::invalid_argument("accepting state out of range");
  accepting_.insert(q);
}

std::size_t TreeAutomaton::transition_count() const {
  std::size_t n = 0;
  for (const auto& rel : transitions_) n += rel.size();
  return n;
}

StateSet interpret(const TermPtr& t, const Assignment& alpha, const TreeAutomaton& a) {
  if (t->is_variable()) {
    auto it = alpha.find(t->head());
    if (it == alpha.end()) {
      throw std::invalid_argument("unbound variable '" + t->head() +
                                  "' in interpretation");
    }
    if (it->second.universe_size() != a.num_states()) {
      throw std::invalid_argument("assignment for '" + t->head() +
                                  "' ranges over a different state space");
    }
    return it->second;
  }
  SymbolId f = a.signature().require(t->head());
  if (a.signature()[f].arity != t->children().size()) {
    throw std::invalid_argument("arity mismatch for '" + t->head() + "'");
  }
  std::vector<StateSet> child_sets;
  child_sets.reserve(t->children().size());
  for (const TermPtr& c : t->children()) {
    child_sets.push_back(interpret(c, alpha, a));
  }
  StateSet out(a.num_states());
  for (const Transition& tr : a.transitions(f)) {
    bool applicable = true;
    for (std::size_t i = 0; i < tr.args.size(); ++i) {
      if (!child_sets[i].test(tr.args[i])) {
        applicable = false;
        break;
      }
    }
    if (applicable) out.insert(tr.target);
  }
  return out;
}

bool accepts(const TermPtr& t, const TreeAutomaton& a) {
  return interpret(t, a).intersects(a.accepting());
}

StateSet reachable_states(const TreeAutomaton& a) {
  StateSet reach(a.num_states());
  bool changed = true;
  while (changed) {
    changed = false;
    for (SymbolId f = 0; f < a.signature().size(); ++f) {
      for (const Transition& tr : a.transitions(f)) {
        if (reach.test(tr.target)) continue;
        bool ok = true;
        for (State q : tr.args) {
          if (!reach.test(q)) {
            ok = false;
            break;
          }
        }
        if (ok) {
          reach.insert(tr.target);
          changed = true;
        }
      }
    }
  }
  return reach;
}

bool is_empty(const TreeAutomaton& a) {
  return !reachable_states(a).intersects(a.accepting());
}

ProductAutomaton product(const TreeAutomaton& a, const TreeAutomaton& b) {
  if (!a.signature().same_symbols(b.signature())) {
    throw std::invalid_argument("product of automata over different signatures");
  }
  const std::uint32_t nb = b.num_states();
  TreeAutomaton prod(a.signature(), a.num_states() * nb);
  for (SymbolId f = 0; f < a.signature().size(); ++f) {
    SymbolId fb = b.signature().require(a.signature()[f].name);
    for (const Transition& ta : a.transitions(f)) {
      for (const Transition& tb : b.transitions(fb)) {
        std::vector<State> args(ta.args.size());
        for (std::size_t i = 0; i < args.size(); ++i) {
          args[i] = ta.args[i] * nb + tb.args[i];
        }
        prod.add_transition(f, std::move(args), ta.target * nb + tb.target);
      }
    }
  }
  std::vector<std::pair<State, State>> pairs;
  pairs.reserve(a.num_states() * nb);
  for (State q = 0; q < a.num_states(); ++q) {
    for (State p = 0; p < nb; ++p) pairs.emplace_back(q, p);
  }
  return ProductAutomaton{std::move(prod), std::move(pairs)};
}

namespace {

// Number of argument tuples over `n` states for the given arity; nullopt on
// overflow (such relations cannot be materialized anyway).
std::optional<std::uint64_t> tuple_space(std::uint32_t n, std::uint32_t arity) {
  std::uint64_t total = 1;
  for (std::uint32_t i = 0; i < arity; ++i) {
    if (n != 0 && total > std::uint64_t{1} << 40) return std::nullopt;
    total *= n;
  }
  return total;
}

}  // namespace

bool check_deterministic_complete(const TreeAutomaton& a) {
  for (SymbolId f = 0; f < a.signature().size(); ++f) {
    const auto& rel = a.transitions(f);
    for (std::size_t i = 1; i < rel.size(); ++i) {
      if (rel[i - 1].args == rel[i].args) return false;  // two targets
    }
    auto space = tuple_space(a.num_states(), a.signature()[f].arity);
    if (!space || rel.size() != *space) return false;
  }
  return true;
}

TreeAutomaton complete_automaton(const TreeAutomaton& a) {
  bool complete = true;
  for (SymbolId f = 0; f < a.signature().size(); ++f) {
    const auto& rel = a.transitions(f);
    for (std::size_t i = 1; i < rel.size(); ++i) {
      if (rel[i - 1].args == rel[i].args) {
        throw std::invalid_argument("completion requires a deterministic automaton");
      }
    }
    auto space = tuple_space(a.num_states(), a.signature()[f].arity);
    if (!space) throw std::invalid_argument("state space too large to complete");
    if (rel.size() != *space) complete = false;
  }
  if (complete) return a;

  const std::uint32_t n = a.num_states() + 1;
  const State sink = a.num_states();
  TreeAutomaton out(a.signature(), n);
  for (State q : a.accepting().to_vector()) out.set_accepting(q);
  for (SymbolId f = 0; f < a.signature().size(); ++f) {
    const std::uint32_t arity = a.signature()[f].arity;
    const auto& rel = a.transitions(f);
    // Walk all tuples over the enlarged state set in lexicographic order;
    // `rel` is sorted, so missing tuples are found by merging.
    std::size_t next = 0;
    std::vector<State> tuple(arity, 0);
    for (;;) {
      if (next < rel.size() && rel[next].args == tuple) {
        out.add_transition(f, rel[next].args, rel[next].target);
        ++next;
      } else {
        out.add_transition(f, tuple, sink);
      }
      std::size_t i = arity;
      while (i > 0 && ++tuple[i - 1] == n) {
        tuple[i - 1] = 0;
        --i;
      }
      if (i == 0) break;
    }
  }
  return out;
}

namespace {

// Minimal node count needed to reach each state, by fixpoint rounds.
std::vector<std::uint64_t> minimal_sizes(const TreeAutomaton& a) {
  constexpr std::uint64_t inf = ~std::uint64_t{0};
  std::vector<std::uint64_t> size(a.num_states(), inf);
  bool changed = true;
  while (changed) {
    changed = false;
    for (SymbolId f = 0; f < a.signature().size(); ++f) {
      for (const Transition& tr : a.transitions(f)) {
        std::uint64_t total = 1;
        bool ok = true;
        for (State q : tr.args) {
          if (size[q] == inf) {
            ok = false;
            break;
          }
          total += size[q];
        }
        if (ok && total < size[tr.target]) {
          size[tr.target] = total;
          changed = true;
        }
      }
    }
  }
  return size;
}

struct WitnessBuilder {
  const TreeAutomaton& a;
  const std::vector<std::uint64_t>& size;
  std::vector<TermPtr> memo;

  explicit WitnessBuilder(const TreeAutomaton& a, const std::vector<std::uint64_t>& size)
      : a(a), size(size), memo(a.num_states()) {}

  // Minimal-size witnesses are rebuilt recursively; among transitions whose
  // argument sizes add up exactly, ties break via term_less. Arguments have
  // strictly smaller minimal size, so the recursion is well-founded.
  TermPtr build(State q) {
    if (memo[q]) return memo[q];
    TermPtr best;
    for (SymbolId f = 0; f < a.signature().size(); ++f) {
      for (const Transition& tr : a.transitions(f)) {
        if (tr.target != q) continue;
        std::uint64_t total = 1;
        bool ok = true;
        for (State arg : tr.args) {
          if (size[arg] == ~std::uint64_t{0}) {
            ok = false;
            break;
          }
          total += size[arg];
        }
        if (!ok || total != size[q]) continue;
        std::vector<TermPtr> children;
        children.reserve(tr.args.size());
        for (State arg : tr.args) children.push_back(build(arg));
        TermPtr cand = Term::app(a.signature()[f].name, std::move(children));
        if (!best || term_less(cand, best, a.signature())) best = std::move(cand);
      }
    }
    memo[q] = best;
    return best;
  }
};

}  // namespace

std::vector<std::optional<TermPtr>> minimal_witnesses(const TreeAutomaton& a) {
  std::vector<std::uint64_t> size = minimal_sizes(a);
  WitnessBuilder builder(a, size);
  std::vector<std::optional<TermPtr>> out(a.num_states());
  for (State q = 0; q < a.num_states(); ++q) {
    if (size[q] != ~std::uint64_t{0}) out[q] = builder.build(q);
  }
  return out;
}

InclusionResult check_inclusion(const TreeAutomaton& a, const TreeAutomaton& b) {
  if (!a.signature().same_symbols(b.signature())) {
    throw std::invalid_argument("inclusion check requires a common signature");
  }
  if (!check_deterministic_complete(b)) {
    throw std::invalid_argument(
        "inclusion check requires a deterministic complete right-hand automaton");
  }
  ProductAutomaton prod = product(a, b);
  StateSet reach = reachable_states(prod.automaton);

  std::vector<State> violating;
  for (State s : reach.to_vector()) {
    auto [q, p] = prod.pairs[s];
    if (a.accepting().test(q) && !b.accepting().test(p)) violating.push_back(s);
  }
  if (violating.empty()) return InclusionResult{true, std::nullopt};

  std::vector<std::optional<TermPtr>> witness = minimal_witnesses(prod.automaton);
  TermPtr best;
  for (State s : violating) {
    if (!witness[s]) continue;  // cannot happen for reachable states
    if (!best || term_less(*witness[s], best, a.signature())) best = *witness[s];
  }
  return InclusionResult{false, best};
}

}  // namespace nonterm
