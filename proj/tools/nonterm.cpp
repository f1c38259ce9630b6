// nonterm -- prove non-termination of rewrite systems, or verify a
// tree-automaton certificate. Exit codes: 0 proven/verified, 1 certificate
// invalid, 2 unknown (search exhausted or timed out), 3 input/usage error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nonterm/certificate.hpp"
#include "nonterm/parser.hpp"
#include "nonterm/search.hpp"

namespace {

using nonterm::Trs;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitProven = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitMaybe = 2;
constexpr int kExitError = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

nonterm::InputFormat pick_format(const std::string& path, const std::string& override) {
  if (override == "trs") return nonterm::InputFormat::trs;
  if (override == "srs") return nonterm::InputFormat::srs;
  if (!override.empty()) throw std::runtime_error("unknown format '" + override + "'");
  return std::filesystem::path(path).extension() == ".srs" ? nonterm::InputFormat::srs
                                                           : nonterm::InputFormat::trs;
}

Trs load_system(const std::string& path, const std::string& format_override) {
  return nonterm::parse_trs(read_file(path), pick_format(path, format_override));
}

ordered_json checks_to_json(const nonterm::Verdict& verdict, const Trs& trs) {
  ordered_json checks;
  checks["nonempty"] = {{"passed", verdict.nonempty}};
  ordered_json qm = {{"passed", verdict.quasi_model.holds}};
  if (!verdict.quasi_model.holds) {
    ordered_json violations = ordered_json::array();
    for (const auto& v : verdict.quasi_model.violations) {
      ordered_json assignment = ordered_json::object();
      for (const auto& [var, set] : v.assignment) {
        assignment[var] = set.to_vector();
      }
      violations.push_back({{"rule", v.rule_index},
                            {"assignment", assignment},
                            {"state", v.state}});
    }
    qm["violations"] = std::move(violations);
    qm["truncated"] = verdict.quasi_model.truncated;
  }
  checks["quasi_model"] = std::move(qm);
  ordered_json ri = {{"passed", verdict.redex_inclusion.passed}};
  if (verdict.redex_inclusion.counterexample) {
    ri["counterexample"] =
        nonterm::display_term(*verdict.redex_inclusion.counterexample, trs);
  }
  checks["redex_inclusion"] = std::move(ri);
  return checks;
}

void print_checks_human(const nonterm::Verdict& verdict, const Trs& trs,
                        std::ostream& out) {
  out << "check nonempty:        " << (verdict.nonempty ? "pass" : "fail") << "\n";
  out << "check quasi-model:     " << (verdict.quasi_model.holds ? "pass" : "fail")
      << "\n";
  if (!verdict.quasi_model.holds && !verdict.quasi_model.violations.empty()) {
    const auto& v = verdict.quasi_model.violations.front();
    out << "  first violation: rule #" << v.rule_index << ", state " << v.state
        << " reachable from lhs but not rhs\n";
  }
  out << "check redex-inclusion: "
      << (verdict.redex_inclusion.passed ? "pass" : "fail") << "\n";
  if (!verdict.redex_inclusion.passed && verdict.redex_inclusion.counterexample) {
    out << "  accepted redex-free term: "
        << nonterm::display_term(*verdict.redex_inclusion.counterexample, trs) << "\n";
  }
}

ordered_json evidence_to_json(const std::vector<nonterm::TermPtr>& trace,
                              const Trs& trs) {
  ordered_json out = ordered_json::array();
  for (const auto& t : trace) out.push_back(nonterm::display_term(t, trs));
  return out;
}

void print_evidence_human(const std::vector<nonterm::TermPtr>& trace, const Trs& trs,
                          std::ostream& out) {
  out << "evidence:\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << (i == 0 ? "  " : "  -> ") << nonterm::display_term(trace[i], trs) << "\n";
  }
}

int run_prove(const std::string& file, const std::string& format_override,
              const nonterm::SearchConfig& config, const std::string& emit_cert,
              int evidence_steps, bool json) {
  Trs trs = load_system(file, format_override);
  if (!nonterm::is_left_linear(trs)) {
    std::cerr << "error: the system is not left-linear; this prover only handles "
                 "left-linear systems (the redex language is regular for those)\n";
    return kExitError;
  }
  nonterm::SearchOutcome outcome = nonterm::search_certificate(trs, config);

  if (outcome.status != nonterm::SearchStatus::found) {
    const char* reason = outcome.status == nonterm::SearchStatus::timed_out
                             ? "timeout"
                             : outcome.status == nonterm::SearchStatus::solver_failed
                                   ? "solver-failure"
                                   : "exhausted";
    if (json) {
      ordered_json j;
      j["verdict"] = "MAYBE";
      j["reason"] = reason;
      j["stats"] = {{"witnesses_tried", outcome.stats.witnesses_tried},
                    {"solver_calls", outcome.stats.solver_calls},
                    {"refinements", outcome.stats.refinements},
                    {"max_states_reached", outcome.stats.max_states_reached}};
      std::cout << j.dump(2) << "\n";
    } else {
      std::cout << "MAYBE\n";
      std::cout << "reason: " << reason << "\n";
    }
    return kExitMaybe;
  }

  const nonterm::Certificate& certificate = *outcome.certificate;
  nonterm::Verdict verdict = nonterm::verify_certificate(trs, certificate);
  std::vector<nonterm::TermPtr> trace;
  if (evidence_steps > 0) {
    trace = nonterm::emit_reduction_evidence(trs, certificate,
                                             static_cast<std::size_t>(evidence_steps));
  }
  if (!emit_cert.empty()) {
    std::ofstream out(emit_cert, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write certificate to '" << emit_cert << "'\n";
      return kExitError;
    }
    out << nonterm::encode_certificate(certificate);
  }

  if (json) {
    ordered_json j;
    j["verdict"] = "NONTERMINATING";
    j["certificate"] = {{"states", certificate.automaton.num_states()},
                        {"provenance", "searched"}};
    j["checks"] = checks_to_json(verdict, trs);
    if (!trace.empty()) j["evidence"] = evidence_to_json(trace, trs);
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "NONTERMINATING\n";
    std::cout << "certificate: " << certificate.automaton.num_states()
              << " states, searched\n";
    print_checks_human(verdict, trs, std::cout);
    if (!emit_cert.empty()) std::cout << "certificate written to " << emit_cert << "\n";
    if (!trace.empty()) print_evidence_human(trace, trs, std::cout);
  }
  return kExitProven;
}

int run_verify(const std::string& file, const std::string& format_override,
               const std::string& cert_path, int evidence_steps, bool force_recheck,
               bool json) {
  Trs trs = load_system(file, format_override);
  nonterm::Certificate certificate = nonterm::decode_certificate(read_file(cert_path));

  const std::string hash = nonterm::system_hash(trs);
  if (certificate.system_hash != hash && !force_recheck) {
    std::cerr << "error: certificate was issued for a system with hash "
              << certificate.system_hash << ", this system hashes to " << hash
              << "; pass --force-recheck to verify anyway\n";
    return kExitError;
  }

  nonterm::Verdict verdict = nonterm::verify_certificate(trs, certificate);
  bool proven = verdict.status == nonterm::VerdictStatus::nonterminating;
  std::vector<nonterm::TermPtr> trace;
  if (proven && evidence_steps > 0) {
    trace = nonterm::emit_reduction_evidence(trs, certificate,
                                             static_cast<std::size_t>(evidence_steps));
  }

  if (json) {
    ordered_json j;
    j["verdict"] = proven ? "NONTERMINATING" : "INVALID";
    j["certificate"] = {{"states", certificate.automaton.num_states()},
                        {"provenance",
                         certificate.provenance.kind == nonterm::Provenance::searched
                             ? "searched"
                             : "hand-written"}};
    j["hash_match"] = certificate.system_hash == hash;
    j["checks"] = checks_to_json(verdict, trs);
    if (!trace.empty()) j["evidence"] = evidence_to_json(trace, trs);
    std::cout << j.dump(2) << "\n";
  } else {
    print_checks_human(verdict, trs, std::cout);
    std::cout << (proven ? "NONTERMINATING" : "INVALID") << "\n";
    if (!trace.empty()) print_evidence_human(trace, trs, std::cout);
  }
  return proven ? kExitProven : kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"non-termination prover and certificate verifier for term/string "
               "rewriting systems"};
  app.require_subcommand(1);

  std::string file, format_override, emit_cert, cert_path;
  int evidence_steps = 0;
  bool json = false, force_recheck = false;
  nonterm::SearchConfig config;
  std::optional<double> timeout;

  CLI::App* prove = app.add_subcommand("prove", "search for a certificate");
  prove->add_option("file", file, "input .trs/.srs file")->required();
  prove->add_option("--format", format_override, "trs or srs (default: by extension)");
  prove->add_option("--max-states", config.max_states, "largest automaton size tried");
  prove->add_option("--witness-depth", config.witness_depth,
                    "depth bound of the witness pool");
  prove->add_option("--timeout", timeout, "wall-clock budget in seconds");
  prove->add_option("--emit-cert", emit_cert, "write the certificate as JSON");
  prove->add_option("--evidence", evidence_steps, "print K reduction steps");
  prove->add_flag("--json", json, "machine-readable report");

  CLI::App* verify = app.add_subcommand("verify", "check a certificate");
  verify->add_option("file", file, "input .trs/.srs file")->required();
  verify->add_option("--cert", cert_path, "certificate JSON file")->required();
  verify->add_option("--format", format_override, "trs or srs (default: by extension)");
  verify->add_option("--evidence", evidence_steps, "print K reduction steps");
  verify->add_flag("--force-recheck", force_recheck,
                   "verify even if the system hash differs");
  verify->add_flag("--json", json, "machine-readable report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitError;
  }

  try {
    if (prove->parsed()) {
      config.timeout_seconds = timeout;
      return run_prove(file, format_override, config, emit_cert, evidence_steps, json);
    }
    return run_verify(file, format_override, cert_path, evidence_steps, force_recheck,
                      json);
  } catch (const nonterm::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const nonterm::CodecError& e) {
    std::cerr << "error: certificate: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
