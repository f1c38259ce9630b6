#include "oracles.hpp"

#include <functional>

namespace oracles {

std::vector<TermPtr> enumerate_all_terms(const Signature& sig, int max_depth) {
  // Layered: depth-0 terms are constants, layer d adds applications whose
  // children come from layers < d. Returned terms share child nodes.
  std::vector<TermPtr> all;
  std::size_t layer_start = 0;
  for (const Symbol& s : sig.symbols()) {
    if (s.arity == 0) all.push_back(Term::app(s.name));
  }
  for (int d = 1; d <= max_depth; ++d) {
    std::size_t layer_end = all.size();
    std::vector<TermPtr> fresh;
    for (const Symbol& s : sig.symbols()) {
      if (s.arity == 0) continue;
      std::vector<TermPtr> children(s.arity);
      // at least one child from the newest layer, so depths are exact
      std::function<void(std::uint32_t, bool)> emit = [&](std::uint32_t pos,
                                                          bool used_new) {
        if (pos == s.arity) {
          if (used_new) fresh.push_back(Term::app(s.name, children));
          return;
        }
        for (std::size_t i = 0; i < layer_end; ++i) {
          children[pos] = all[i];
          emit(pos + 1, used_new || i >= layer_start);
        }
      };
      emit(0, false);
    }
    layer_start = layer_end;
    for (TermPtr& t : fresh) all.push_back(std::move(t));
    if (layer_start == all.size()) break;  // nothing new can appear
  }
  return all;
}

std::vector<std::vector<std::string>> enumerate_words(
    const std::vector<std::string>& alphabet, int max_len) {
  std::vector<std::vector<std::string>> words{{}};
  std::size_t prev_start = 0;
  for (int len = 1; len <= max_len; ++len) {
    std::size_t prev_end = words.size();
    for (std::size_t i = prev_start; i < prev_end; ++i) {
      for (const std::string& letter : alphabet) {
        std::vector<std::string> w = words[i];
        w.push_back(letter);
        words.push_back(std::move(w));
      }
    }
    prev_start = prev_end;
  }
  return words;
}

namespace {

bool can_run_to(const TermPtr& t, State q, const TreeAutomaton& a) {
  SymbolId f = a.signature().require(t->head());
  for (const Transition& tr : a.transitions(f)) {
    if (tr.target != q) continue;
    bool ok = true;
    for (std::size_t i = 0; i < tr.args.size(); ++i) {
      if (!can_run_to(t->children()[i], tr.args[i], a)) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

}  // namespace

bool oracle_accepts(const TermPtr& t, const TreeAutomaton& a) {
  for (State q : a.accepting().to_vector()) {
    if (can_run_to(t, q, a)) return true;
  }
  return false;
}

namespace {

using Position = std::vector<std::size_t>;

void collect_positions(const TermPtr& t, Position& here, std::vector<Position>& out) {
  out.push_back(here);
  for (std::size_t i = 0; i < t->children().size(); ++i) {
    here.push_back(i);
    collect_positions(t->children()[i], here, out);
    here.pop_back();
  }
}

TermPtr subterm_at(const TermPtr& t, const Position& pos, std::size_t i = 0) {
  if (i == pos.size()) return t;
  return subterm_at(t->children()[pos[i]], pos, i + 1);
}

TermPtr replace_at(const TermPtr& t, const Position& pos, const TermPtr& with,
                   std::size_t i = 0) {
  if (i == pos.size()) return with;
  std::vector<TermPtr> children = t->children();
  children[pos[i]] = replace_at(children[pos[i]], pos, with, i + 1);
  return Term::app(t->head(), std::move(children));
}

}  // namespace

std::vector<TermPtr> oracle_reducts(const TermPtr& t, const Trs& trs) {
  std::vector<Position> positions;
  Position here;
  collect_positions(t, here, positions);
  std::vector<TermPtr> out;
  for (const Position& pos : positions) {
    TermPtr sub = subterm_at(t, pos);
    for (const Rule& rule : trs.rules()) {
      if (auto sigma = match_pattern(rule.lhs, sub)) {
        TermPtr reduct = replace_at(t, pos, apply_substitution(rule.rhs, *sigma));
        bool seen = false;
        for (const TermPtr& r : out) {
          if (term_equal(r, reduct)) {
            seen = true;
            break;
          }
        }
        if (!seen) out.push_back(std::move(reduct));
      }
    }
  }
  return out;
}

bool MemoAcceptance::accepts(const TermPtr& t) {
  return states(t).intersects(a_.accepting());
}

const StateSet& MemoAcceptance::states(const TermPtr& t) {
  auto it = memo_.find(t.get());
  if (it != memo_.end()) return it->second;
  SymbolId f = a_.signature().require(t->head());
  std::vector<const StateSet*> child_sets;
  for (const TermPtr& c : t->children()) child_sets.push_back(&states(c));
  StateSet out(a_.num_states());
  for (const Transition& tr : a_.transitions(f)) {
    bool ok = true;
    for (std::size_t i = 0; i < tr.args.size(); ++i) {
      if (!child_sets[i]->test(tr.args[i])) {
        ok = false;
        break;
      }
    }
    if (ok) out.insert(tr.target);
  }
  return memo_.emplace(t.get(), std::move(out)).first->second;
}

bool MemoRedex::contains(const TermPtr& t) {
  auto it = memo_.find(t.get());
  if (it != memo_.end()) return it->second;
  bool found = false;
  for (const Rule& rule : trs_.rules()) {
    if (match_pattern(rule.lhs, t)) {
      found = true;
      break;
    }
  }
  if (!found) {
    for (const TermPtr& c : t->children()) {
      if (contains(c)) {
        found = true;
        break;
      }
    }
  }
  return memo_.emplace(t.get(), found).first->second;
}

}  // namespace oracles
