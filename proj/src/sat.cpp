#include "nonterm/sat.hpp"

#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <csignal>
#include <cassert>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nonterm::sat {

namespace {

// ---------------------------------------------------------------------------
// Embedded CDCL solver: two-watched-literal propagation, first-UIP clause
// learning, VSIDS decisions with phase saving, Luby restarts and activity-
// based learnt-clause reduction. Fully deterministic.
// TODO: conflict clause minimization (recursive reason walks) would shrink
// learnt clauses further; not needed at current instance sizes.
// ---------------------------------------------------------------------------

constexpr int kUndef = -1;

inline std::size_t lit_index(Lit l) {
  return 2 * static_cast<std::size_t>(std::abs(l)) + (l < 0 ? 1 : 0);
}

struct Clause {
  std::vector<Lit> lits;
  double activity = 0.0;
  bool learnt = false;
};

struct Watcher {
  int clause;
  Lit blocker;
};

class Cdcl {
 public:
  explicit Cdcl(const Cnf& cnf, const Deadline& deadline)
      : num_vars_(cnf.num_vars), deadline_(deadline) {
    value_.assign(num_vars_ + 1, 0);
    level_.assign(num_vars_ + 1, 0);
    reason_.assign(num_vars_ + 1, kUndef);
    activity_.assign(num_vars_ + 1, 0.0);
    phase_.assign(num_vars_ + 1, false);
    heap_pos_.assign(num_vars_ + 1, kUndef);
    seen_.assign(num_vars_ + 1, 0);
    watches_.assign(2 * (num_vars_ + 1), {});
    for (int v = 1; v <= num_vars_; ++v) heap_insert(v);
    ok_ = true;
    for (const auto& clause : cnf.clauses) {
      if (!add_clause(clause)) {
        ok_ = false;
        break;
      }
    }
  }

  Result solve() {
    if (!ok_) return {Outcome::unsatisfiable, {}};
    if (propagate() != kUndef) return {Outcome::unsatisfiable, {}};

    std::int64_t conflicts_total = 0;
    int restart = 0;
    double max_learnts = 4000.0 + 0.3 * static_cast<double>(num_clauses_);
    for (;;) {
      std::int64_t budget = 128 * luby(restart++);
      std::int64_t conflicts = 0;
      for (;;) {
        int confl = propagate();
        if (confl != kUndef) {
          ++conflicts;
          ++conflicts_total;
          if (decision_level() == 0) return {Outcome::unsatisfiable, {}};
          std::vector<Lit> learnt;
          int back_level = 0;
          analyze(confl, learnt, back_level);
          backtrack(back_level);
          attach_learnt(std::move(learnt));
          decay_activities();
          if ((conflicts_total & 1023) == 0 && out_of_time()) {
            return {Outcome::unknown, {}};
          }
        } else {
          if (conflicts >= budget) {
            backtrack(0);
            break;  // restart
          }
          if (static_cast<double>(num_learnts_) > max_learnts) {
            reduce_learnts();
            max_learnts *= 1.1;
          }
          Lit next = decide();
          if (next == 0) {
            Result r{Outcome::satisfiable, std::vector<bool>(num_vars_ + 1, false)};
            for (int v = 1; v <= num_vars_; ++v) r.model[v] = value_[v] > 0;
            return r;
          }
          new_decision_level();
          enqueue(next, kUndef);
        }
      }
    }
  }

 private:
  // ----- state -----
  int num_vars_;
  Deadline deadline_;
  bool ok_ = true;
  std::vector<Clause> clauses_;
  std::size_t num_clauses_ = 0;  // original clauses actually attached
  std::size_t num_learnts_ = 0;
  std::vector<std::vector<Watcher>> watches_;
  std::vector<signed char> value_;  // per var: +1 true, -1 false, 0 unset
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;
  std::vector<double> activity_;
  double var_inc_ = 1.0;
  double clause_inc_ = 1.0;
  std::vector<bool> phase_;
  std::vector<int> heap_;      // max-heap of vars by activity
  std::vector<int> heap_pos_;  // var -> heap slot, kUndef if absent
  std::vector<signed char> seen_;

  // ----- helpers -----
  signed char lit_value(Lit l) const {
    signed char v = value_[std::abs(l)];
    return l > 0 ? v : static_cast<signed char>(-v);
  }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }
  void new_decision_level() { trail_lim_.push_back(static_cast<int>(trail_.size())); }

  bool out_of_time() const {
    return deadline_ && std::chrono::steady_clock::now() > *deadline_;
  }

  static std::int64_t luby(int i) {
    // Luby sequence: 1,1,2,1,1,2,4,...
    for (std::int64_t k = 1; k < 64; ++k) {
      if (i + 1 == (std::int64_t{1} << k) - 1) return std::int64_t{1} << (k - 1);
    }
    std::int64_t k = 1;
    while ((std::int64_t{1} << k) - 1 <= i) ++k;
    --k;
    return luby(i - static_cast<int>((std::int64_t{1} << k) - 1));
  }

  // ----- variable order heap -----
  bool heap_less(int a, int b) const {
    return activity_[a] != activity_[b] ? activity_[a] > activity_[b] : a < b;
  }
  void heap_sift_up(std::size_t i) {
    int v = heap_[i];
    while (i > 0) {
      std::size_t parent = (i - 1) / 2;
      if (!heap_less(v, heap_[parent])) break;
      heap_[i] = heap_[parent];
      heap_pos_[heap_[i]] = static_cast<int>(i);
      i = parent;
    }
    heap_[i] = v;
    heap_pos_[v] = static_cast<int>(i);
  }
  void heap_sift_down(std::size_t i) {
    int v = heap_[i];
    for (;;) {
      std::size_t child = 2 * i + 1;
      if (child >= heap_.size()) break;
      if (child + 1 < heap_.size() && heap_less(heap_[child + 1], heap_[child])) ++child;
      if (!heap_less(heap_[child], v)) break;
      heap_[i] = heap_[child];
      heap_pos_[heap_[i]] = static_cast<int>(i);
      i = child;
    }
    heap_[i] = v;
    heap_pos_[v] = static_cast<int>(i);
  }
  void heap_insert(int v) {
    if (heap_pos_[v] != kUndef) return;
    heap_.push_back(v);
    heap_pos_[v] = static_cast<int>(heap_.size() - 1);
    heap_sift_up(heap_.size() - 1);
  }
  int heap_pop() {
    int v = heap_[0];
    heap_pos_[v] = kUndef;
    heap_[0] = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
      heap_pos_[heap_[0]] = 0;
      heap_sift_down(0);
    }
    return v;
  }

  // ----- clause management -----
  bool add_clause(const std::vector<Lit>& in) {
    std::vector<Lit> lits(in);
    std::sort(lits.begin(), lits.end(),
              [](Lit a, Lit b) { return std::abs(a) != std::abs(b)
                                            ? std::abs(a) < std::abs(b)
                                            : a < b; });
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (std::size_t i = 1; i < lits.size(); ++i) {
      if (lits[i] == -lits[i - 1]) return true;  // tautology
    }
    std::vector<Lit> pruned;
    for (Lit l : lits) {
      if (std::abs(l) > num_vars_) throw std::invalid_argument("literal out of range");
      signed char v = lit_value(l);
      if (v > 0) return true;  // already satisfied at level 0
      if (v == 0) pruned.push_back(l);
    }
    if (pruned.empty()) return false;
    if (pruned.size() == 1) return enqueue(pruned[0], kUndef);
    attach(std::move(pruned), false);
    return true;
  }

  int attach(std::vector<Lit> lits, bool learnt) {
    int id = static_cast<int>(clauses_.size());
    watches_[lit_index(lits[0])].push_back({id, lits[1]});
    watches_[lit_index(lits[1])].push_back({id, lits[0]});
    clauses_.push_back(Clause{std::move(lits), 0.0, learnt});
    if (learnt) {
      ++num_learnts_;
    } else {
      ++num_clauses_;
    }
    return id;
  }

  void attach_learnt(std::vector<Lit> learnt) {
    if (learnt.size() == 1) {
      enqueue(learnt[0], kUndef);
      return;
    }
    int id = attach(std::move(learnt), true);
    bump_clause(id);
    enqueue(clauses_[id].lits[0], id);
  }

  bool enqueue(Lit l, int reason) {
    int v = std::abs(l);
    if (value_[v] != 0) return lit_value(l) > 0;
    value_[v] = l > 0 ? 1 : -1;
    level_[v] = decision_level();
    reason_[v] = reason;
    phase_[v] = l > 0;
    trail_.push_back(l);
    return true;
  }

  // Returns a conflicting clause id, or kUndef.
  int propagate() {
    while (qhead_ < trail_.size()) {
      Lit p = trail_[qhead_++];  // p became true; visit clauses watching -p
      std::vector<Watcher>& ws = watches_[lit_index(-p)];
      std::size_t keep = 0;
      for (std::size_t i = 0; i < ws.size(); ++i) {
        Watcher w = ws[i];
        if (lit_value(w.blocker) > 0) {
          ws[keep++] = w;
          continue;
        }
        Clause& c = clauses_[w.clause];
        std::vector<Lit>& lits = c.lits;
        if (lits[0] == -p) std::swap(lits[0], lits[1]);
        // now lits[1] == -p
        if (lit_value(lits[0]) > 0) {
          ws[keep++] = {w.clause, lits[0]};
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < lits.size(); ++k) {
          if (lit_value(lits[k]) >= 0) {
            std::swap(lits[1], lits[k]);
            watches_[lit_index(lits[1])].push_back({w.clause, lits[0]});
            moved = true;
            break;
          }
        }
        if (moved) continue;
        // unit or conflict
        ws[keep++] = {w.clause, lits[0]};
        if (lit_value(lits[0]) < 0) {
          for (std::size_t j = i + 1; j < ws.size(); ++j) ws[keep++] = ws[j];
          ws.resize(keep);
          qhead_ = trail_.size();
          return w.clause;
        }
        enqueue(lits[0], w.clause);
      }
      ws.resize(keep);
    }
    return kUndef;
  }

  void bump_var(int v) {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
      for (int u = 1; u <= num_vars_; ++u) activity_[u] *= 1e-100;
      var_inc_ *= 1e-100;
    }
    if (heap_pos_[v] != kUndef) heap_sift_up(heap_pos_[v]);
  }
  void bump_clause(int id) {
    Clause& c = clauses_[id];
    c.activity += clause_inc_;
    if (c.activity > 1e20) {
      for (Clause& d : clauses_) d.activity *= 1e-20;
      clause_inc_ *= 1e-20;
    }
  }
  void decay_activities() {
    var_inc_ /= 0.95;
    clause_inc_ /= 0.999;
  }

  void analyze(int confl, std::vector<Lit>& out, int& back_level) {
    out.push_back(0);  // slot for the asserting literal
    int path = 0;
    Lit p = 0;
    std::size_t index = trail_.size();
    int conflict_clause = confl;
    do {
      Clause& c = clauses_[conflict_clause];
      if (c.learnt) bump_clause(conflict_clause);
      for (std::size_t i = (p == 0 ? 0 : 1); i < c.lits.size(); ++i) {
        Lit q = c.lits[i];
        int v = std::abs(q);
        if (seen_[v] || level_[v] == 0) continue;
        seen_[v] = 1;
        bump_var(v);
        if (level_[v] >= decision_level()) {
          ++path;
        } else {
          out.push_back(q);
        }
      }
      while (!seen_[std::abs(trail_[index - 1])]) --index;
      p = trail_[--index];
      conflict_clause = reason_[std::abs(p)];
      seen_[std::abs(p)] = 0;
      --path;
      if (path > 0 && conflict_clause == kUndef) {
        // cannot happen: every non-decision on the current level has a reason
        assert(false);
      }
    } while (path > 0);
    out[0] = -p;

    // watch the second-highest level in slot 1 and compute the backtrack level
    if (out.size() == 1) {
      back_level = 0;
    } else {
      std::size_t best = 1;
      for (std::size_t i = 2; i < out.size(); ++i) {
        if (level_[std::abs(out[i])] > level_[std::abs(out[best])]) best = i;
      }
      std::swap(out[1], out[best]);
      back_level = level_[std::abs(out[1])];
    }
    for (Lit l : out) seen_[std::abs(l)] = 0;
  }

  void backtrack(int target) {
    if (decision_level() <= target) return;
    std::size_t limit = static_cast<std::size_t>(trail_lim_[target]);
    for (std::size_t i = trail_.size(); i-- > limit;) {
      int v = std::abs(trail_[i]);
      value_[v] = 0;
      reason_[v] = kUndef;
      heap_insert(v);
    }
    trail_.resize(limit);
    trail_lim_.resize(target);
    qhead_ = limit;
  }

  Lit decide() {
    while (!heap_.empty()) {
      int v = heap_[0];
      if (value_[v] == 0) {
        heap_pop();
        return phase_[v] ? v : -v;
      }
      heap_pop();
    }
    return 0;
  }

  bool clause_locked(int id) const {
    const Clause& c = clauses_[id];
    return reason_[std::abs(c.lits[0])] == id && lit_value(c.lits[0]) > 0;
  }

  void reduce_learnts() {
    std::vector<int> learnts;
    for (int i = 0; i < static_cast<int>(clauses_.size()); ++i) {
      if (clauses_[i].learnt && clauses_[i].lits.size() > 2 && !clause_locked(i)) {
        learnts.push_back(i);
      }
    }
    std::sort(learnts.begin(), learnts.end(), [&](int a, int b) {
      return clauses_[a].activity != clauses_[b].activity
                 ? clauses_[a].activity < clauses_[b].activity
                 : a < b;
    });
    std::vector<bool> drop(clauses_.size(), false);
    for (std::size_t i = 0; i < learnts.size() / 2; ++i) drop[learnts[i]] = true;

    // compact the clause store and rebuild every watch list
    std::vector<int> remap(clauses_.size(), kUndef);
    std::vector<Clause> kept;
    kept.reserve(clauses_.size());
    for (std::size_t i = 0; i < clauses_.size(); ++i) {
      if (drop[i]) continue;
      remap[i] = static_cast<int>(kept.size());
      kept.push_back(std::move(clauses_[i]));
    }
    clauses_ = std::move(kept);
    num_learnts_ = 0;
    for (const Clause& c : clauses_) {
      if (c.learnt) ++num_learnts_;
    }
    for (auto& ws : watches_) ws.clear();
    for (int i = 0; i < static_cast<int>(clauses_.size()); ++i) {
      const std::vector<Lit>& lits = clauses_[i].lits;
      watches_[lit_index(lits[0])].push_back({i, lits[1]});
      watches_[lit_index(lits[1])].push_back({i, lits[0]});
    }
    for (int v = 1; v <= num_vars_; ++v) {
      if (reason_[v] != kUndef) reason_[v] = remap[reason_[v]];
    }
  }
};

class CdclSolver final : public Solver {
 public:
  Result solve(const Cnf& cnf, const Deadline& deadline) override {
    Cdcl engine(cnf, deadline);
    Result r = engine.solve();
    if (r.outcome == Outcome::satisfiable) {
      for (const auto& clause : cnf.clauses) {
        bool sat = false;
        for (Lit l : clause) {
          if ((l > 0) == r.model[std::abs(l)]) {
            sat = true;
            break;
          }
        }
        if (!sat) throw std::logic_error("CDCL returned a non-model");
      }
    }
    return r;
  }
};

}  // namespace

std::string to_dimacs(const Cnf& cnf) {
  std::ostringstream out;
  out << "p cnf " << cnf.num_vars << " " << cnf.clauses.size() << "\n";
  for (const auto& clause : cnf.clauses) {
    for (Lit l : clause) out << l << " ";
    out << "0\n";
  }
  return out.str();
}

Result parse_solver_output(std::string_view text, int num_vars) {
  std::istringstream in{std::string(text)};
  std::string line;
  Result result;
  bool sat = false;
  std::vector<Lit> lits;
  while (std::getline(in, line)) {
    if (line.rfind("s ", 0) == 0) {
      if (line.find("UNSATISFIABLE") != std::string::npos) {
        result.outcome = Outcome::unsatisfiable;
        return result;
      }
      if (line.find("SATISFIABLE") != std::string::npos) sat = true;
    } else if (line.rfind("v ", 0) == 0) {
      std::istringstream vs(line.substr(2));
      Lit l;
      while (vs >> l) {
        if (l != 0) lits.push_back(l);
      }
    }
  }
  if (!sat) return result;  // unknown
  result.outcome = Outcome::satisfiable;
  result.model.assign(num_vars + 1, false);
  for (Lit l : lits) {
    if (std::abs(l) <= num_vars) result.model[std::abs(l)] = l > 0;
  }
  return result;
}

namespace {

class ExternalSolver final : public Solver {
 public:
  explicit ExternalSolver(std::string path) : path_(std::move(path)) {}

  Result solve(const Cnf& cnf, const Deadline& deadline) override {
    char name[] = "/tmp/nonterm-cnf-XXXXXX";
    int fd = mkstemp(name);
    if (fd < 0) return {Outcome::unknown, {}};
    {
      std::string dimacs = to_dimacs(cnf);
      ssize_t rc = write(fd, dimacs.data(), dimacs.size());
      close(fd);
      if (rc < 0 || static_cast<std::size_t>(rc) != dimacs.size()) {
        unlink(name);
        return {Outcome::unknown, {}};
      }
    }
    std::string output;
    bool ok = run_process(name, deadline, output);
    unlink(name);
    if (!ok) return {Outcome::unknown, {}};
    return parse_solver_output(output, cnf.num_vars);
  }

 private:
  bool run_process(const char* cnf_path, const Deadline& deadline, std::string& out) {
    int pipefd[2];
    if (pipe(pipefd) != 0) return false;
    pid_t pid = fork();
    if (pid < 0) {
      close(pipefd[0]);
      close(pipefd[1]);
      return false;
    }
    if (pid == 0) {
      dup2(pipefd[1], STDOUT_FILENO);
      close(pipefd[0]);
      close(pipefd[1]);
      execlp(path_.c_str(), path_.c_str(), cnf_path, nullptr);
      _exit(127);
    }
    close(pipefd[1]);
    char buffer[4096];
    bool killed = false;
    for (;;) {
      if (!killed && deadline && std::chrono::steady_clock::now() > *deadline) {
        kill(pid, SIGKILL);
        killed = true;
      }
      pollfd pfd{pipefd[0], POLLIN, 0};
      int rc = poll(&pfd, 1, 200);
      if (rc < 0) break;
      if (rc == 0) continue;  // timeout tick, re-check the deadline
      ssize_t n = read(pipefd[0], buffer, sizeof(buffer));
      if (n > 0) {
        out.append(buffer, static_cast<std::size_t>(n));
        continue;
      }
      break;
    }
    close(pipefd[0]);
    int status = 0;
    waitpid(pid, &status, 0);
    if (killed) return false;
    // SAT-competition solvers exit 10/20; treat anything with parseable
    // output as an answer and everything else as unknown.
    return WIFEXITED(status) && WEXITSTATUS(status) != 127;
  }

  std::string path_;
};

}  // namespace

std::unique_ptr<Solver> make_cdcl_solver() { return std::make_unique<CdclSolver>(); }

std::unique_ptr<Solver> make_external_solver(std::string path) {
  return std::make_unique<ExternalSolver>(std::move(path));
}

std::unique_ptr<Solver> make_default_solver() {
  if (const char* path = std::getenv("NONTERM_SAT_SOLVER"); path && *path) {
    return make_external_solver(path);
  }
  return make_cdcl_solver();
}

}  // namespace nonterm::sat
