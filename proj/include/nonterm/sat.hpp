// sat.hpp -- CNF formulas and SAT solving. The default engine is an
// embedded CDCL solver; an external solver honoring the DIMACS/SAT-
// competition conventions can be plugged in via NONTERM_SAT_SOLVER.

#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace nonterm::sat {

/// DIMACS-style literal: var v > 0 is the positive literal v, negative -v.
using Lit = int;

struct Cnf {
  int num_vars = 0;
  std::vector<std::vector<Lit>> clauses;

  Lit new_var() { return ++num_vars; }
  void add_clause(std::vector<Lit> lits) { clauses.push_back(std::move(lits)); }
};

enum class Outcome { satisfiable, unsatisfiable, unknown };

struct Result {
  Outcome outcome = Outcome::unknown;
  /// Indexed 1..num_vars when satisfiable.
  std::vector<bool> model;
};

using Deadline = std::optional<std::chrono::steady_clock::time_point>;

class Solver {
 public:
  virtual ~Solver() = default;
  virtual Result solve(const Cnf& cnf, const Deadline& deadline = {}) = 0;
};

std::unique_ptr<Solver> make_cdcl_solver();
/// Runs `path <cnf-file>` and reads "s ..." / "v ..." lines from stdout.
std::unique_ptr<Solver> make_external_solver(std::string path);
/// External solver from $NONTERM_SAT_SOLVER when set, else the embedded one.
std::unique_ptr<Solver> make_default_solver();

std::string to_dimacs(const Cnf& cnf);
/// Parses SAT-competition output conventions ("s SATISFIABLE", "v" lines).
Result parse_solver_output(std::string_view text, int num_vars);

}  // namespace nonterm::sat
