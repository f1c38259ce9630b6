#include "nonterm/quasi_model.hpp"

#include <algorithm>

namespace nonterm {

SingletonAssignmentRange::SingletonAssignmentRange(std::vector<std::string> vars,
                                                   std::uint32_t num_states)
    : vars_(std::move(vars)), num_states_(num_states) {
  std::sort(vars_.begin(), vars_.end());
  vars_.erase(std::unique(vars_.begin(), vars_.end()), vars_.end());
}

SingletonAssignmentRange::iterator::iterator(const SingletonAssignmentRange* range,
                                             bool done)
    : range_(range), digits_(range->vars_.size(), 0), done_(done) {
  if (!done_) materialize();
}

void SingletonAssignmentRange::iterator::materialize() {
  current_.clear();
  for (std::size_t i = 0; i < digits_.size(); ++i) {
    current_.emplace(range_->vars_[i],
                     StateSet::single(range_->num_states_, digits_[i]));
  }
}

SingletonAssignmentRange::iterator& SingletonAssignmentRange::iterator::operator++() {
  // Odometer with the last variable fastest; empty digit vector means the
  // single empty assignment has just been visited.
  std::size_t i = digits_.size();
  while (i > 0) {
    if (++digits_[i - 1] < range_->num_states_) break;
    digits_[i - 1] = 0;
    --i;
  }
  if (i == 0) {
    done_ = true;
  } else {
    materialize();
  }
  return *this;
}

std::size_t SingletonAssignmentRange::size() const {
  std::size_t total = 1;
  for (std::size_t i = 0; i < vars_.size(); ++i) total *= num_states_;
  return total;
}

SingletonAssignmentRange enumerate_singleton_assignments(std::vector<std::string> vars,
                                                         std::uint32_t num_states) {
  return SingletonAssignmentRange(std::move(vars), num_states);
}

QuasiModelReport is_quasi_model(const TreeAutomaton& a, const Trs& trs,
                                const QuasiModelOptions& options) {
  if (!a.signature().same_symbols(trs.signature())) {
    throw std::invalid_argument("automaton and rewrite system signatures differ");
  }
  QuasiModelReport report;
  report.holds = true;
  for (std::size_t rule_index = 0; rule_index < trs.rules().size(); ++rule_index) {
    const Rule& rule = trs.rules()[rule_index];
    SingletonAssignmentRange range(variables_of(rule.lhs), a.num_states());
    for (const Assignment& alpha : range) {
      StateSet lhs = interpret(rule.lhs, alpha, a);
      if (lhs.empty()) continue;
      StateSet rhs = interpret(rule.rhs, alpha, a);
      if (lhs.subset_of(rhs)) continue;
      report.holds = false;
      for (State q : lhs.to_vector()) {
        if (rhs.test(q)) continue;
        if (report.violations.size() >= options.violation_cap) {
          report.truncated = true;
          return report;
        }
        report.violations.push_back(QuasiModelViolation{rule_index, alpha, q});
      }
    }
  }
  return report;
}

}  // namespace nonterm
