// quasi_model.hpp -- decide the quasi-model property of an automaton for a
// rewrite system via singleton assignments, which suffice: an automaton is a
// quasi-model iff [[l]] <= [[r]] holds under every assignment mapping each
// variable to a singleton state set. A quasi-model's language is closed
// under rewriting.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nonterm/tree_automaton.hpp"

namespace nonterm {

/// Streams the |Q|^|vars| assignments binding each variable to a singleton,
/// in lexicographic order: variables sorted by name, state ids ascending,
/// the last variable cycling fastest.
class SingletonAssignmentRange {
 public:
  SingletonAssignmentRange(std::vector<std::string> vars, std::uint32_t num_states);

  class iterator {
   public:
    const Assignment& operator*() const { return current_; }
    iterator& operator++();
    bool operator!=(const iterator& o) const { return done_ != o.done_; }

   private:
    friend class SingletonAssignmentRange;
    iterator(const SingletonAssignmentRange* range, bool done);
    void materialize();

    const SingletonAssignmentRange* range_;
    std::vector<State> digits_;
    Assignment current_;
    bool done_;
  };

  iterator begin() const { return iterator(this, num_states_ == 0 && !vars_.empty()); }
  iterator end() const { return iterator(this, true); }
  /// |Q|^|vars|
  std::size_t size() const;

 private:
  std::vector<std::string> vars_;
  std::uint32_t num_states_;
};

SingletonAssignmentRange enumerate_singleton_assignments(std::vector<std::string> vars,
                                                         std::uint32_t num_states);

struct QuasiModelViolation {
  std::size_t rule_index;
  Assignment assignment;
  /// State in [[lhs]] but not in [[rhs]] under the assignment.
  State state;
};

struct QuasiModelReport {
  bool holds = false;
  /// In canonical order (rule index, assignment, state id), truncated at the
  /// cap; holds iff empty.
  std::vector<QuasiModelViolation> violations;
  bool truncated = false;
};

struct QuasiModelOptions {
  std::size_t violation_cap = 32;
};

QuasiModelReport is_quasi_model(const TreeAutomaton& a, const Trs& trs,
                                const QuasiModelOptions& options = {});

}  // namespace nonterm
