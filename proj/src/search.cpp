#include "nonterm/search.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "nonterm/quasi_model.hpp"
#include "nonterm/redex_automaton.hpp"

namespace nonterm {

namespace {

// Internal calibration knobs for the witness pool (see SearchConfig for the
// user-facing parameters).
constexpr std::size_t kRawScanCap = 300000;   // enumeration prefix scanned
constexpr std::size_t kPreseedScan = 600;     // prefix searched for normal forms
constexpr std::size_t kPreseedCap = 256;      // rejected list preseed bound
constexpr int kProbeTargetSteps = 25;         // reduction length deemed plausible
constexpr std::size_t kProbeNodeBudget = 4000;

}  // namespace

VarLayout::VarLayout(const Signature& sig, std::uint32_t num_states)
    : num_states_(num_states) {
  std::uint64_t next = 0;
  symbol_offset_.reserve(sig.size());
  for (const Symbol& s : sig.symbols()) {
    symbol_offset_.push_back(next);
    std::uint64_t tuples = 1;
    for (std::uint32_t i = 0; i < s.arity; ++i) tuples *= num_states;
    next += tuples * num_states;
  }
  accepting_offset_ = next;
  base_vars_ = static_cast<int>(next + num_states);
}

sat::Lit VarLayout::transition_var(SymbolId f, const std::vector<State>& args,
                                   State target) const {
  std::uint64_t tuple = 0;
  for (State q : args) tuple = tuple * num_states_ + q;
  return static_cast<sat::Lit>(symbol_offset_[f] + tuple * num_states_ + target + 1);
}

sat::Lit VarLayout::accepting_var(State q) const {
  return static_cast<sat::Lit>(accepting_offset_ + q + 1);
}

namespace {

// ---------------------------------------------------------------------------
// Encoding
// ---------------------------------------------------------------------------

using Binding = std::vector<std::pair<std::string, State>>;  // sorted by name

struct InstKey {
  TermPtr term;
  Binding binding;

  bool operator==(const InstKey& o) const {
    return binding == o.binding && term_equal(term, o.term);
  }
};

struct InstKeyHash {
  std::size_t operator()(const InstKey& k) const {
    std::size_t h = k.term->hash();
    for (const auto& [name, q] : k.binding) {
      h ^= std::hash<std::string>{}(name) + 0x9e3779b9 + (h << 6) + (h >> 2);
      h ^= q + 0x9e3779b9 + (h << 6) + (h >> 2);
    }
    return h;
  }
};

// Interpretation of a subterm under a binding: either pinned to one state
// (variables) or a vector of per-state literals.
struct InstGates {
  bool fixed = false;
  State fixed_state = 0;
  std::vector<sat::Lit> y;
};

class Encoder {
 public:
  Encoder(const Trs& trs, std::uint32_t n)
      : trs_(trs), n_(n), layout_(trs.signature(), n) {
    cnf_.num_vars = layout_.base_vars();
  }

  void require_quasi_model() {
    for (const Rule& rule : trs_.rules()) {
      SingletonAssignmentRange range(variables_of(rule.lhs), n_);
      for (const Assignment& alpha : range) {
        Binding binding;
        for (const auto& [var, set] : alpha) {
          binding.emplace_back(var, set.to_vector().at(0));
        }
        const InstGates& lhs = instance(rule.lhs, binding);
        const InstGates& rhs = instance(rule.rhs, binding);
        for (State q = 0; q < n_; ++q) {
          sat::Lit l = gate_lit(lhs, q);
          sat::Lit r = gate_lit(rhs, q);
          if (l == kFalse) continue;            // q never in [[lhs]]
          if (r == kTrue) continue;             // inclusion trivial
          if (l == kTrue && r == kFalse) {
            cnf_.add_clause({});                // unsatisfiable rule instance
          } else if (l == kTrue) {
            cnf_.add_clause({r});
          } else if (r == kFalse) {
            cnf_.add_clause({-l});
          } else {
            cnf_.add_clause({-l, r});
          }
        }
      }
    }
  }

  void require_accepted(const TermPtr& witness) {
    const InstGates& w = instance(witness, {});
    std::vector<sat::Lit> disjuncts;
    for (State q = 0; q < n_; ++q) {
      sat::Lit y = gate_lit(w, q);
      if (y == kFalse) continue;
      sat::Lit a = layout_.accepting_var(q);
      if (y == kTrue) {
        disjuncts.push_back(a);
        continue;
      }
      sat::Lit both = cnf_.new_var();
      cnf_.add_clause({-both, y});
      cnf_.add_clause({-both, a});
      cnf_.add_clause({both, -y, -a});
      disjuncts.push_back(both);
    }
    cnf_.add_clause(std::move(disjuncts));  // empty clause when unsatisfiable
  }

  void forbid_accepted(const TermPtr& term) {
    const InstGates& g = instance(term, {});
    for (State q = 0; q < n_; ++q) {
      sat::Lit y = gate_lit(g, q);
      if (y == kFalse) continue;
      if (y == kTrue) {
        cnf_.add_clause({-layout_.accepting_var(q)});
      } else {
        cnf_.add_clause({-y, -layout_.accepting_var(q)});
      }
    }
  }

  CertificateEncoding finish() {
    return CertificateEncoding{std::move(cnf_), layout_, std::move(instances_)};
  }

 private:
  // Sentinels for constant-folded gates; real gate literals are always
  // positive variables, so these cannot collide.
  static constexpr sat::Lit kTrue = 0;
  static constexpr sat::Lit kFalse = -1;

  // Literal for "q in interpretation", or the kTrue/kFalse sentinels.
  sat::Lit gate_lit(const InstGates& g, State q) const {
    if (g.fixed) return q == g.fixed_state ? kTrue : kFalse;
    return g.y[q];
  }

  const InstGates& instance(const TermPtr& term, const Binding& full_binding) {
    Binding binding = restrict_binding(term, full_binding);
    InstKey key{term, binding};
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;

    InstGates gates;
    if (term->is_variable()) {
      gates.fixed = true;
      gates.fixed_state = binding.at(0).second;
      return cache_.emplace(std::move(key), std::move(gates)).first->second;
    }

    SymbolId f = trs_.signature().require(term->head());
    std::vector<const InstGates*> children;
    children.reserve(term->children().size());
    for (const TermPtr& c : term->children()) {
      children.push_back(&instance(c, full_binding));
    }
    // The recursion may rehash the cache; child pointers stay valid because
    // unordered_map never moves node storage.

    const std::size_t arity = term->children().size();
    bool all_fixed = true;
    for (const InstGates* c : children) all_fixed = all_fixed && c->fixed;

    if (all_fixed) {
      // exactly one admissible argument tuple: y aliases the transition var
      std::vector<State> args(arity);
      for (std::size_t i = 0; i < arity; ++i) args[i] = children[i]->fixed_state;
      gates.y.resize(n_);
      for (State q = 0; q < n_; ++q) gates.y[q] = layout_.transition_var(f, args, q);
    } else {
      gates.y.resize(n_);
      for (State q = 0; q < n_; ++q) gates.y[q] = cnf_.new_var();
      // aux(tuple, q) <-> x(f, tuple, q) /\ children's y at the tuple;
      // y[q] <-> OR over aux(tuple, q).
      std::vector<std::vector<sat::Lit>> aux_per_state(n_);
      std::vector<State> tuple(arity, 0);
      std::vector<std::size_t> free_positions;
      for (std::size_t i = 0; i < arity; ++i) {
        if (children[i]->fixed) {
          tuple[i] = children[i]->fixed_state;
        } else {
          free_positions.push_back(i);
        }
      }
      for (;;) {
        std::vector<sat::Lit> child_lits;
        for (std::size_t i : free_positions) {
          child_lits.push_back(children[i]->y[tuple[i]]);
        }
        for (State q = 0; q < n_; ++q) {
          sat::Lit x = layout_.transition_var(f, tuple, q);
          sat::Lit aux = cnf_.new_var();
          cnf_.add_clause({-aux, x});
          std::vector<sat::Lit> back{aux, -x};
          for (sat::Lit cl : child_lits) {
            cnf_.add_clause({-aux, cl});
            back.push_back(-cl);
          }
          cnf_.add_clause(std::move(back));
          aux_per_state[q].push_back(aux);
        }
        // advance the free positions odometer
        std::size_t i = free_positions.size();
        while (i > 0) {
          State& digit = tuple[free_positions[i - 1]];
          if (++digit < n_) break;
          digit = 0;
          --i;
        }
        if (i == 0) break;
      }
      for (State q = 0; q < n_; ++q) {
        std::vector<sat::Lit> any{-gates.y[q]};
        for (sat::Lit aux : aux_per_state[q]) {
          cnf_.add_clause({-aux, gates.y[q]});
          any.push_back(aux);
        }
        cnf_.add_clause(std::move(any));
      }
    }

    auto [slot, inserted] = cache_.emplace(std::move(key), std::move(gates));
    assert(inserted);
    if (!slot->second.fixed) {
      instances_.push_back(TermInstance{term, slot->first.binding, slot->second.y});
    }
    return slot->second;
  }

  Binding restrict_binding(const TermPtr& term, const Binding& full) const {
    if (full.empty()) return {};
    std::vector<std::string> vars = variables_of(term);
    Binding out;
    for (const auto& entry : full) {
      if (std::find(vars.begin(), vars.end(), entry.first) != vars.end()) {
        out.push_back(entry);
      }
    }
    return out;
  }

  const Trs& trs_;
  std::uint32_t n_;
  VarLayout layout_;
  sat::Cnf cnf_;
  std::unordered_map<InstKey, InstGates, InstKeyHash> cache_;
  std::vector<TermInstance> instances_;
};

}  // namespace

CertificateEncoding encode_certificate_constraints(const Trs& trs, int num_states,
                                                   const TermPtr& witness,
                                                   const std::vector<TermPtr>& rejected) {
  if (num_states < 1) throw std::invalid_argument("num_states must be positive");
  if (!is_ground(witness)) throw std::invalid_argument("witness must be ground");
  Encoder encoder(trs, static_cast<std::uint32_t>(num_states));
  encoder.require_quasi_model();
  encoder.require_accepted(witness);
  for (const TermPtr& u : rejected) encoder.forbid_accepted(u);
  return encoder.finish();
}

TreeAutomaton decode_model(const std::vector<bool>& model, int num_states,
                           const Signature& sig) {
  const std::uint32_t n = static_cast<std::uint32_t>(num_states);
  VarLayout layout(sig, n);
  TreeAutomaton a(sig, n);
  for (SymbolId f = 0; f < sig.size(); ++f) {
    const std::uint32_t arity = sig[f].arity;
    std::vector<State> tuple(arity, 0);
    for (;;) {
      for (State q = 0; q < n; ++q) {
        sat::Lit x = layout.transition_var(f, tuple, q);
        if (model.at(static_cast<std::size_t>(x))) a.add_transition(f, tuple, q);
      }
      std::size_t i = arity;
      while (i > 0 && ++tuple[i - 1] == n) {
        tuple[i - 1] = 0;
        --i;
      }
      if (i == 0) break;
    }
  }
  for (State q = 0; q < n; ++q) {
    if (model.at(static_cast<std::size_t>(layout.accepting_var(q)))) a.set_accepting(q);
  }
  return a;
}

// ---------------------------------------------------------------------------
// Ground term enumeration
// ---------------------------------------------------------------------------

namespace {

std::uint64_t max_size_for_depth(const Signature& sig, int depth) {
  std::uint32_t max_arity = 0;
  for (const Symbol& s : sig.symbols()) max_arity = std::max(max_arity, s.arity);
  if (max_arity == 0) return 1;
  std::uint64_t size = 1;
  for (int d = 0; d < depth; ++d) {
    if (size > (std::uint64_t{1} << 40) / max_arity) return std::uint64_t{1} << 40;
    size = 1 + max_arity * size;
  }
  return size;
}

}  // namespace

TermEnumerator::TermEnumerator(Signature sig, int max_depth)
    : sig_(std::move(sig)),
      max_depth_(max_depth),
      max_size_(max_size_for_depth(sig_, max_depth)) {
  memo_.resize(max_depth_ + 1);
}

const std::vector<TermPtr>& TermEnumerator::terms_of(std::uint32_t size, int depth) {
  auto& by_size = memo_[depth];
  if (by_size.size() <= size) by_size.resize(size + 1);
  auto& slot = by_size[size];
  static const std::vector<TermPtr> kEmpty;
  if (size == 0) return kEmpty;
  if (slot) return *slot;

  // size 1: constants, in signature order
  std::vector<TermPtr> out;
  if (size == 1) {
    for (const Symbol& s : sig_.symbols()) {
      if (s.arity == 0) out.push_back(Term::app(s.name));
    }
  } else if (depth > 0) {
    for (SymbolId f = 0; f < sig_.size(); ++f) {
      const std::uint32_t arity = sig_[f].arity;
      if (arity == 0 || size < arity + 1) continue;
      std::vector<TermPtr> children(arity);
      // children left to right; child i takes any size leaving >= 1 node for
      // each remaining position
      auto emit = [&](auto&& self, std::uint32_t pos, std::uint32_t remaining) -> void {
        if (pos == arity) {
          if (remaining == 0) out.push_back(Term::app(sig_[f].name, children));
          return;
        }
        std::uint32_t slots_left = arity - pos - 1;
        for (std::uint32_t s = 1; s + slots_left <= remaining; ++s) {
          for (const TermPtr& t : terms_of(s, depth - 1)) {
            children[pos] = t;
            self(self, pos + 1, remaining - s);
          }
        }
      };
      emit(emit, 0, size - 1);
    }
  }
  slot = std::move(out);
  return *slot;
}

std::optional<TermPtr> TermEnumerator::next() {
  while (current_size_ <= max_size_) {
    const std::vector<TermPtr>& terms = terms_of(current_size_, max_depth_);
    if (index_ < terms.size()) return terms[index_++];
    ++current_size_;
    index_ = 0;
  }
  return std::nullopt;
}

std::vector<TermPtr> enumerate_ground_terms(const Signature& sig, int depth,
                                            std::size_t count) {
  if (!sig.has_constant()) {
    throw std::invalid_argument("signature has no constant: no ground terms exist");
  }
  TermEnumerator en(sig, depth);
  std::vector<TermPtr> out;
  while (out.size() < count) {
    auto t = en.next();
    if (!t) break;
    out.push_back(std::move(*t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// CEGAR search
// ---------------------------------------------------------------------------

namespace {

struct PathSeen {
  std::vector<TermPtr> stack;

  bool contains(const TermPtr& t) const {
    for (const TermPtr& s : stack) {
      if (term_equal(s, t)) return true;
    }
    return false;
  }
};

// Plausibility probe: certificate languages contain only non-terminating
// terms, so a witness must admit an unbounded reduction. Search for a path of
// kProbeTargetSteps steps (a cycle counts as success); exhausting the whole
// reduction graph below that bound proves the term useless as a witness.
bool probe_rec(const TermPtr& t, const Trs& trs, PathSeen& path, int remaining,
               std::size_t& budget) {
  if (remaining <= 0) return true;
  if (budget == 0) return true;  // inconclusive: keep the witness
  --budget;
  std::vector<TermPtr> reducts = one_step_reducts(t, trs);
  if (reducts.empty()) return false;
  path.stack.push_back(t);
  for (const TermPtr& s : reducts) {
    if (path.contains(s)) {
      path.stack.pop_back();
      return true;  // cycle = loop = non-terminating
    }
    if (probe_rec(s, trs, path, remaining - 1, budget)) {
      path.stack.pop_back();
      return true;
    }
  }
  path.stack.pop_back();
  return false;
}

bool plausibly_nonterminating(const TermPtr& t, const Trs& trs) {
  PathSeen path;
  std::size_t budget = kProbeNodeBudget;
  return probe_rec(t, trs, path, kProbeTargetSteps, budget);
}

struct WitnessPool {
  std::vector<TermPtr> witnesses;
  std::vector<TermPtr> normal_forms;  // rejected-list preseed
};

WitnessPool collect_witnesses(const Trs& trs, const SearchConfig& config,
                              const sat::Deadline& deadline) {
  WitnessPool pool;
  TermEnumerator en(trs.signature(), config.witness_depth);
  std::size_t scanned = 0;
  while (pool.witnesses.size() < static_cast<std::size_t>(config.witness_pool_size) &&
         scanned < kRawScanCap) {
    if (deadline && std::chrono::steady_clock::now() > *deadline) break;
    auto t = en.next();
    if (!t) break;
    ++scanned;
    if (!contains_redex(*t, trs)) {
      if (scanned <= kPreseedScan && pool.normal_forms.size() < kPreseedCap) {
        pool.normal_forms.push_back(*t);
      }
      continue;
    }
    if (plausibly_nonterminating(*t, trs)) pool.witnesses.push_back(std::move(*t));
  }
  return pool;
}

}  // namespace

SearchOutcome search_certificate_with_decoder(const Trs& trs, const SearchConfig& config,
                                              sat::Solver* solver,
                                              const ModelDecoder& decoder) {
  if (!is_left_linear(trs)) {
    throw std::invalid_argument("certificate search requires a left-linear system");
  }
  std::unique_ptr<sat::Solver> owned;
  if (!solver) {
    owned = sat::make_default_solver();
    solver = owned.get();
  }
  sat::Deadline deadline;
  if (config.timeout_seconds) {
    deadline = std::chrono::steady_clock::now() +
               std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                   std::chrono::duration<double>(*config.timeout_seconds));
  }
  auto timed_out = [&] {
    return deadline && std::chrono::steady_clock::now() > *deadline;
  };

  SearchOutcome outcome;
  const std::string hash = system_hash(trs);

  WitnessPool pool = collect_witnesses(trs, config, deadline);
  std::vector<TermPtr> rejected = pool.normal_forms;
  std::unordered_set<TermPtr, TermPtrHash, TermPtrEq> rejected_set(rejected.begin(),
                                                                   rejected.end());
  bool solver_trouble = false;

  for (int n = 1; n <= config.max_states; ++n) {
    outcome.stats.max_states_reached = n;
    for (const TermPtr& witness : pool.witnesses) {
      if (timed_out()) {
        outcome.status = SearchStatus::timed_out;
        return outcome;
      }
      ++outcome.stats.witnesses_tried;
      for (int round = 0; round <= config.max_refinements; ++round) {
        CertificateEncoding enc =
            encode_certificate_constraints(trs, n, witness, rejected);
        ++outcome.stats.solver_calls;
        sat::Result res = solver->solve(enc.cnf, deadline);
        if (res.outcome == sat::Outcome::unknown) {
          if (timed_out()) {
            outcome.status = SearchStatus::timed_out;
            return outcome;
          }
          solver_trouble = true;  // failure local to this instance
          break;
        }
        if (res.outcome == sat::Outcome::unsatisfiable) break;

        TreeAutomaton automaton = decoder(res.model, n, trs.signature());
        Certificate certificate{std::move(automaton), hash,
                                {Provenance::searched,
                                 "found by SAT search, " + std::to_string(n) + " states"}};
        Verdict verdict = verify_certificate(trs, certificate);
        if (verdict.status == VerdictStatus::nonterminating) {
          outcome.status = SearchStatus::found;
          outcome.certificate = std::move(certificate);
          return outcome;
        }
        if (!verdict.redex_inclusion.passed && verdict.redex_inclusion.counterexample) {
          TermPtr cex = *verdict.redex_inclusion.counterexample;
          if (rejected_set.insert(cex).second) {
            rejected.push_back(std::move(cex));
            ++outcome.stats.refinements;
            continue;
          }
        }
        // A failed check other than redex inclusion (or a repeated
        // counterexample) means the decoded automaton does not satisfy the
        // encoding: give up on this instance rather than loop.
        solver_trouble = true;
        break;
      }
    }
  }
  outcome.status = solver_trouble ? SearchStatus::solver_failed : SearchStatus::exhausted;
  if (timed_out()) outcome.status = SearchStatus::timed_out;
  return outcome;
}

SearchOutcome search_certificate(const Trs& trs, const SearchConfig& config,
                                 sat::Solver* solver) {
  return search_certificate_with_decoder(trs, config, solver, decode_model);
}

}  // namespace nonterm
