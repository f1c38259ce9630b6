#include "properties.hpp"

#include <algorithm>
#include <sstream>

#include "nonterm/quasi_model.hpp"
#include "nonterm/redex_automaton.hpp"
#include "nonterm/search.hpp"
#include "oracles.hpp"

namespace properties {

namespace {

void note(Failures& failures, const std::string& message) {
  if (failures.size() < 40) failures.push_back(message);
}

}  // namespace

Signature small_signature() {
  Signature sig;
  sig.add("c", 0);
  sig.add("f", 1);
  sig.add("g", 2);
  return sig;
}

TreeAutomaton random_automaton(const Signature& sig, std::uint32_t num_states,
                               std::mt19937& rng, double density) {
  TreeAutomaton a(sig, num_states);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (SymbolId f = 0; f < sig.size(); ++f) {
    const std::uint32_t arity = sig[f].arity;
    std::vector<State> tuple(arity, 0);
    for (;;) {
      for (State q = 0; q < num_states; ++q) {
        if (coin(rng) < density) a.add_transition(f, tuple, q);
      }
      std::size_t i = arity;
      while (i > 0 && ++tuple[i - 1] == num_states) {
        tuple[i - 1] = 0;
        --i;
      }
      if (i == 0) break;
    }
  }
  for (State q = 0; q < num_states; ++q) {
    if (coin(rng) < 0.4) a.set_accepting(q);
  }
  return a;
}

TreeAutomaton random_deterministic_complete(const Signature& sig,
                                            std::uint32_t num_states,
                                            std::mt19937& rng) {
  TreeAutomaton a(sig, num_states);
  std::uniform_int_distribution<State> pick(0, num_states - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (SymbolId f = 0; f < sig.size(); ++f) {
    const std::uint32_t arity = sig[f].arity;
    std::vector<State> tuple(arity, 0);
    for (;;) {
      a.add_transition(f, tuple, pick(rng));
      std::size_t i = arity;
      while (i > 0 && ++tuple[i - 1] == num_states) {
        tuple[i - 1] = 0;
        --i;
      }
      if (i == 0) break;
    }
  }
  for (State q = 0; q < num_states; ++q) {
    if (coin(rng) < 0.5) a.set_accepting(q);
  }
  return a;
}

namespace {

// All subsets of [0, n) as StateSets.
std::vector<StateSet> all_subsets(std::uint32_t n) {
  std::vector<StateSet> out;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    StateSet s(n);
    for (State q = 0; q < n; ++q) {
      if (mask & (1u << q)) s.insert(q);
    }
    out.push_back(std::move(s));
  }
  return out;
}

bool holds_for_assignments(const TreeAutomaton& a, const Rule& rule,
                           const std::vector<StateSet>& choices) {
  std::vector<std::string> vars = variables_of(rule.lhs);
  std::vector<std::size_t> digits(vars.size(), 0);
  for (;;) {
    Assignment alpha;
    for (std::size_t i = 0; i < vars.size(); ++i) alpha.emplace(vars[i], choices[digits[i]]);
    if (!interpret(rule.lhs, alpha, a).subset_of(interpret(rule.rhs, alpha, a))) {
      return false;
    }
    std::size_t i = digits.size();
    while (i > 0 && ++digits[i - 1] == choices.size()) {
      digits[i - 1] = 0;
      --i;
    }
    if (i == 0) return true;
  }
}

}  // namespace

Failures lemma15_agreement_suite(int instances) {
  Failures failures;
  Signature sig = small_signature();
  std::vector<Rule> rules{
      Rule{Term::app("f", {Term::var("x")}), Term::app("g", {Term::var("x"), Term::var("x")})},
      Rule{Term::app("g", {Term::var("x"), Term::var("y")}), Term::app("f", {Term::var("y")})},
      Rule{Term::app("f", {Term::app("c")}), Term::app("c")},
  };
  Trs trs(sig, rules);
  for (int seed = 0; seed < instances; ++seed) {
    std::mt19937 rng(9000 + seed);
    std::uint32_t n = 2 + (seed % 2);  // 2 or 3 states
    TreeAutomaton a = random_automaton(sig, n, rng, 0.3);

    std::vector<StateSet> singletons;
    for (State q = 0; q < n; ++q) singletons.push_back(StateSet::single(n, q));
    std::vector<StateSet> subsets = all_subsets(n);

    for (std::size_t r = 0; r < rules.size(); ++r) {
      bool by_singletons = holds_for_assignments(a, rules[r], singletons);
      bool by_subsets = holds_for_assignments(a, rules[r], subsets);
      if (by_singletons != by_subsets) {
        note(failures, "seed " + std::to_string(seed) + " rule " + std::to_string(r) +
                           ": singleton check " + (by_singletons ? "holds" : "fails") +
                           " but power-set check " + (by_subsets ? "holds" : "fails"));
      }
    }
    bool all_rules_singleton = true;
    for (const Rule& rule : rules) {
      all_rules_singleton = all_rules_singleton && holds_for_assignments(a, rule, singletons);
    }
    if (is_quasi_model(a, trs).holds != all_rules_singleton) {
      note(failures, "seed " + std::to_string(seed) +
                         ": is_quasi_model disagrees with direct singleton check");
    }
  }
  return failures;
}

Failures closure_suite(const TreeAutomaton& a, const Trs& trs,
                       const std::vector<TermPtr>& terms, const char* label) {
  Failures failures;
  oracles::MemoAcceptance acceptance(a);
  std::size_t accepted = 0;
  for (const TermPtr& t : terms) {
    if (!acceptance.accepts(t)) continue;
    ++accepted;
    for (const TermPtr& s : oracles::oracle_reducts(t, trs)) {
      if (!accepts(s, a)) {
        note(failures, std::string(label) + ": accepted " + to_string(t) +
                           " rewrites to rejected " + to_string(s));
      }
    }
  }
  if (accepted == 0) {
    note(failures, std::string(label) + ": no accepted term in the enumeration");
  }
  return failures;
}

Failures product_semantics_suite(int instances, int depth) {
  Failures failures;
  Signature sig = small_signature();
  std::vector<TermPtr> terms = oracles::enumerate_all_terms(sig, depth);
  for (int seed = 0; seed < instances; ++seed) {
    std::mt19937 rng(4200 + seed);
    TreeAutomaton a = random_automaton(sig, 2 + (seed % 2), rng, 0.45);
    TreeAutomaton b = random_automaton(sig, 2 + ((seed + 1) % 2), rng, 0.45);
    ProductAutomaton prod = product(a, b);

    std::vector<bool> realized(prod.pairs.size(), false);
    for (const TermPtr& t : terms) {
      StateSet in_a = interpret(t, a);
      StateSet in_b = interpret(t, b);
      StateSet in_prod = interpret(t, prod.automaton);
      for (State s = 0; s < prod.automaton.num_states(); ++s) {
        auto [q, p] = prod.pairs[s];
        bool expected = in_a.test(q) && in_b.test(p);
        if (in_prod.test(s) != expected) {
          note(failures, "seed " + std::to_string(seed) + ": [[" + to_string(t) +
                             "]] disagrees at pair (" + std::to_string(q) + "," +
                             std::to_string(p) + ")");
        }
        if (expected) realized[s] = true;
      }
    }
    StateSet reach = reachable_states(prod.automaton);
    for (State s = 0; s < prod.automaton.num_states(); ++s) {
      // enumeration is depth-bounded: realized implies reachable, and a
      // reachable pair must be realized once the depth covers its witness
      if (realized[s] && !reach.test(s)) {
        note(failures, "seed " + std::to_string(seed) + ": realized pair (" +
                           std::to_string(prod.pairs[s].first) + "," +
                           std::to_string(prod.pairs[s].second) + ") not reachable");
      }
    }
    std::vector<std::optional<TermPtr>> witnesses = minimal_witnesses(prod.automaton);
    for (State s : reach.to_vector()) {
      if (!witnesses[s]) {
        note(failures,
             "seed " + std::to_string(seed) + ": reachable pair without witness");
        continue;
      }
      if (!realized[s] && static_cast<int>((*witnesses[s])->depth()) <= depth) {
        note(failures, "seed " + std::to_string(seed) + ": reachable pair (" +
                           std::to_string(prod.pairs[s].first) + "," +
                           std::to_string(prod.pairs[s].second) +
                           ") has witness within depth but was not realized");
      }
    }
  }
  return failures;
}

Failures inclusion_oracle_suite(int instances, int depth) {
  Failures failures;
  Signature sig = small_signature();
  std::vector<TermPtr> terms = oracles::enumerate_all_terms(sig, depth);
  for (int seed = 0; seed < instances; ++seed) {
    std::mt19937 rng(7100 + seed);
    TreeAutomaton a = random_automaton(sig, 2 + (seed % 3), rng, 0.4);
    TreeAutomaton b = random_deterministic_complete(sig, 2 + ((seed + 1) % 2), rng);
    InclusionResult result = check_inclusion(a, b);
    if (result.holds) {
      for (const TermPtr& t : terms) {
        if (accepts(t, a) && !accepts(t, b)) {
          note(failures, "seed " + std::to_string(seed) +
                             ": inclusion reported but violated by " + to_string(t));
        }
      }
    } else {
      if (!result.counterexample) {
        note(failures, "seed " + std::to_string(seed) + ": no counterexample");
        continue;
      }
      const TermPtr& cex = *result.counterexample;
      if (!accepts(cex, a) || accepts(cex, b)) {
        note(failures, "seed " + std::to_string(seed) + ": bogus counterexample " +
                           to_string(cex));
      }
      if (!oracles::oracle_accepts(cex, a) || oracles::oracle_accepts(cex, b)) {
        note(failures, "seed " + std::to_string(seed) +
                           ": oracle rejects counterexample " + to_string(cex));
      }
    }
  }
  return failures;
}

Failures encoding_fidelity_suite(const Trs& trs, int num_states, const TermPtr& witness,
                                 const std::vector<TermPtr>& rejected,
                                 sat::Solver& solver) {
  Failures failures;
  CertificateEncoding enc =
      encode_certificate_constraints(trs, num_states, witness, rejected);
  sat::Result res = solver.solve(enc.cnf);
  if (res.outcome != sat::Outcome::satisfiable) {
    note(failures, "expected a satisfiable encoding");
    return failures;
  }
  TreeAutomaton a = decode_model(res.model, num_states, trs.signature());

  for (const TermInstance& inst : enc.instances) {
    Assignment alpha;
    for (const auto& [var, q] : inst.binding) {
      alpha.emplace(var, StateSet::single(a.num_states(), q));
    }
    StateSet truth = interpret(inst.term, alpha, a);
    for (State q = 0; q < a.num_states(); ++q) {
      bool model_value = res.model.at(static_cast<std::size_t>(inst.y[q]));
      if (model_value != truth.test(q)) {
        std::ostringstream msg;
        msg << "y mismatch for " << to_string(inst.term) << " at state " << q
            << ": model says " << model_value << ", interpretation says "
            << truth.test(q);
        note(failures, msg.str());
      }
    }
  }

  if (!is_quasi_model(a, trs).holds) {
    note(failures, "decoded automaton is not a quasi-model");
  }
  if (!accepts(witness, a)) {
    note(failures, "decoded automaton rejects the witness");
  }
  for (const TermPtr& u : rejected) {
    if (accepts(u, a)) {
      note(failures, "decoded automaton accepts rejected term " + to_string(u));
    }
  }
  return failures;
}

namespace {

// Desk-scale audit that a still-passing mutant is genuinely valid.
Failures audit_genuine_validity(const Trs& trs, const Certificate& certificate,
                                int audit_depth, const std::string& label) {
  Failures failures;
  const TreeAutomaton& a = certificate.automaton;
  std::vector<TermPtr> trace = emit_reduction_evidence(trs, certificate, 25);
  oracles::MemoRedex redex(trs);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (!accepts(trace[i], a)) {
      note(failures, label + ": evidence step " + std::to_string(i) + " rejected");
    }
    if (!redex.contains(trace[i])) {
      note(failures, label + ": evidence step " + std::to_string(i) + " is a normal form");
    }
  }
  std::vector<TermPtr> terms = oracles::enumerate_all_terms(trs.signature(), audit_depth);
  oracles::MemoAcceptance acceptance(a);
  for (const TermPtr& t : terms) {
    if (!acceptance.accepts(t)) continue;
    if (!redex.contains(t)) {
      note(failures, label + ": accepted normal form " + to_string(t));
    }
    for (const TermPtr& s : oracles::oracle_reducts(t, trs)) {
      if (!accepts(s, a)) {
        note(failures, label + ": closure broken at " + to_string(t));
      }
    }
  }
  return failures;
}

}  // namespace

Failures mutation_suite(const Trs& trs, const Certificate& certificate,
                        const Rule& extra_rule, int audit_depth, const char* label) {
  Failures failures;
  const TreeAutomaton& base = certificate.automaton;

  auto check_mutant = [&](const Trs& system, TreeAutomaton mutant,
                          const std::string& what) {
    Certificate cert{std::move(mutant), system_hash(system), certificate.provenance};
    Verdict verdict = verify_certificate(system, cert);
    if (verdict.status == VerdictStatus::invalid) return;  // flipped, as expected
    for (const std::string& f :
         audit_genuine_validity(system, cert, audit_depth, std::string(label) + "/" + what)) {
      note(failures, f);
    }
  };

  // drop each transition in turn
  for (SymbolId f = 0; f < base.signature().size(); ++f) {
    for (std::size_t skip = 0; skip < base.transitions(f).size(); ++skip) {
      TreeAutomaton mutant(base.signature(), base.num_states());
      for (State q : base.accepting().to_vector()) mutant.set_accepting(q);
      for (SymbolId g = 0; g < base.signature().size(); ++g) {
        for (std::size_t i = 0; i < base.transitions(g).size(); ++i) {
          if (g == f && i == skip) continue;
          mutant.add_transition(g, base.transitions(g)[i].args,
                                base.transitions(g)[i].target);
        }
      }
      check_mutant(trs, std::move(mutant),
                   "drop transition #" + std::to_string(skip) + " of " +
                       base.signature()[f].name);
    }
  }

  // drop each accepting state in turn
  for (State drop : base.accepting().to_vector()) {
    TreeAutomaton mutant(base.signature(), base.num_states());
    for (State q : base.accepting().to_vector()) {
      if (q != drop) mutant.set_accepting(q);
    }
    for (SymbolId g = 0; g < base.signature().size(); ++g) {
      for (const Transition& t : base.transitions(g)) {
        mutant.add_transition(g, t.args, t.target);
      }
    }
    check_mutant(trs, std::move(mutant), "drop accepting " + std::to_string(drop));
  }

  // add one rule to the system
  {
    std::vector<Rule> rules = trs.rules();
    rules.push_back(extra_rule);
    Trs extended(trs.signature(), std::move(rules), trs.origin());
    TreeAutomaton copy(base.signature(), base.num_states());
    for (State q : base.accepting().to_vector()) copy.set_accepting(q);
    for (SymbolId g = 0; g < base.signature().size(); ++g) {
      for (const Transition& t : base.transitions(g)) {
        copy.add_transition(g, t.args, t.target);
      }
    }
    check_mutant(extended, std::move(copy), "extra rule");
  }
  return failures;
}

}  // namespace properties
