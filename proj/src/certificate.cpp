#include "nonterm/certificate.hpp"

#include <openssl/evp.h>

#include <json.hpp>

#include "nonterm/parser.hpp"
#include "nonterm/redex_automaton.hpp"

namespace nonterm {

using ordered_json = nlohmann::ordered_json;

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (!EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr)) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string system_hash(const Trs& trs) { return sha256_hex(pretty_print(trs)); }

Verdict verify_certificate(const Trs& trs, const Certificate& certificate) {
  const TreeAutomaton& a = certificate.automaton;
  if (!a.signature().same_symbols(trs.signature())) {
    throw std::invalid_argument(
        "certificate signature does not match the rewrite system");
  }
  if (!is_left_linear(trs)) {
    throw std::invalid_argument(
        "verification requires a left-linear system (the redex language of a "
        "non-left-linear system need not be regular)");
  }

  Verdict verdict;
  verdict.nonempty = !is_empty(a);
  verdict.quasi_model = is_quasi_model(a, trs);

  InclusionResult inclusion = check_inclusion(a, build_redex_automaton(trs));
  verdict.redex_inclusion.passed = inclusion.holds;
  verdict.redex_inclusion.counterexample = inclusion.counterexample;

  bool all = verdict.nonempty && verdict.quasi_model.holds && inclusion.holds;
  verdict.status = all ? VerdictStatus::nonterminating : VerdictStatus::invalid;
  return verdict;
}

std::vector<TermPtr> emit_reduction_evidence(const Trs& trs,
                                             const Certificate& certificate,
                                             std::size_t steps) {
  const TreeAutomaton& a = certificate.automaton;

  std::vector<std::optional<TermPtr>> witness = minimal_witnesses(a);
  TermPtr current;
  for (State q : a.accepting().to_vector()) {
    if (!witness[q]) continue;
    if (!current || term_less(*witness[q], current, a.signature())) {
      current = *witness[q];
    }
  }
  if (!current) {
    throw std::logic_error(
        "evidence requested for a certificate with an empty language");
  }

  std::vector<TermPtr> trace{current};
  for (std::size_t i = 0; i < steps; ++i) {
    TermPtr next;
    for (const TermPtr& reduct : one_step_reducts(current, trs)) {
      if (accepts(reduct, a)) {
        next = reduct;
        break;
      }
    }
    if (!next) {
      // A verified certificate guarantees an accepted reduct: the language
      // is closed and every member has a redex.
      throw std::logic_error("no accepted reduct from " + to_string(current) +
                             "; the verifier accepted an unsound certificate");
    }
    trace.push_back(next);
    current = std::move(next);
  }
  return trace;
}

namespace {

[[noreturn]] void codec_fail(const std::string& message) { throw CodecError(message); }

const ordered_json& field(const ordered_json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    codec_fail(std::string("certificate is missing field '") + name + "'");
  }
  return j.at(name);
}

}  // namespace

std::string encode_certificate(const Certificate& certificate) {
  const TreeAutomaton& a = certificate.automaton;
  ordered_json j;
  j["signature"] = ordered_json::array();
  for (const Symbol& s : a.signature().symbols()) {
    j["signature"].push_back({{"name", s.name}, {"arity", s.arity}});
  }
  j["states"] = a.num_states();
  j["accepting"] = a.accepting().to_vector();
  ordered_json transitions = ordered_json::object();
  for (SymbolId f = 0; f < a.signature().size(); ++f) {
    ordered_json rel = ordered_json::array();
    for (const Transition& t : a.transitions(f)) {
      rel.push_back(ordered_json::array({t.args, t.target}));
    }
    transitions[a.signature()[f].name] = std::move(rel);
  }
  j["transitions"] = std::move(transitions);
  j["system_hash"] = certificate.system_hash;
  j["provenance"] = {
      {"kind", certificate.provenance.kind == Provenance::searched ? "searched"
                                                                   : "hand-written"},
      {"note", certificate.provenance.note}};
  return j.dump(2) + "\n";
}

Certificate decode_certificate(std::string_view text) {
  ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded()) codec_fail("certificate is not valid JSON");

  Signature sig;
  const ordered_json& jsig = field(j, "signature");
  if (!jsig.is_array()) codec_fail("'signature' must be an array");
  for (const ordered_json& s : jsig) {
    if (!field(s, "name").is_string() || !field(s, "arity").is_number_unsigned()) {
      codec_fail("signature entries need a string 'name' and unsigned 'arity'");
    }
    try {
      sig.add(s.at("name").get<std::string>(), s.at("arity").get<std::uint32_t>());
    } catch (const std::invalid_argument& e) {
      codec_fail(e.what());
    }
  }

  const ordered_json& jstates = field(j, "states");
  if (!jstates.is_number_unsigned()) codec_fail("'states' must be a non-negative count");
  const std::uint32_t n = jstates.get<std::uint32_t>();

  TreeAutomaton automaton(std::move(sig), n);
  const ordered_json& jacc = field(j, "accepting");
  if (!jacc.is_array()) codec_fail("'accepting' must be an array of state ids");
  for (const ordered_json& q : jacc) {
    if (!q.is_number_unsigned() || q.get<std::uint64_t>() >= n) {
      codec_fail("accepting state id out of range");
    }
    automaton.set_accepting(q.get<State>());
  }

  const ordered_json& jtrans = field(j, "transitions");
  if (!jtrans.is_object()) codec_fail("'transitions' must be an object");
  for (const auto& [name, rel] : jtrans.items()) {
    auto id = automaton.signature().find(name);
    if (!id) codec_fail("transition for unknown symbol '" + name + "'");
    if (!rel.is_array()) codec_fail("transitions of '" + name + "' must be an array");
    const std::uint32_t arity = automaton.signature()[*id].arity;
    for (const ordered_json& entry : rel) {
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_array() ||
          !entry[1].is_number_unsigned()) {
        codec_fail("transition entries must be [[q1,...,qn], q]");
      }
      if (entry[0].size() != arity) {
        codec_fail("transition for '" + name + "' has tuple arity " +
                   std::to_string(entry[0].size()) + ", symbol arity is " +
                   std::to_string(arity));
      }
      std::vector<State> args;
      args.reserve(arity);
      for (const ordered_json& q : entry[0]) {
        if (!q.is_number_unsigned() || q.get<std::uint64_t>() >= n) {
          codec_fail("transition argument state id out of range");
        }
        args.push_back(q.get<State>());
      }
      if (entry[1].get<std::uint64_t>() >= n) {
        codec_fail("transition target state id out of range");
      }
      automaton.add_transition(*id, std::move(args), entry[1].get<State>());
    }
  }

  Certificate certificate{std::move(automaton), "", {}};
  const ordered_json& jhash = field(j, "system_hash");
  if (!jhash.is_string()) codec_fail("'system_hash' must be a hex string");
  certificate.system_hash = jhash.get<std::string>();

  const ordered_json& jprov = field(j, "provenance");
  std::string kind = field(jprov, "kind").get<std::string>();
  if (kind == "searched") {
    certificate.provenance.kind = Provenance::searched;
  } else if (kind == "hand-written") {
    certificate.provenance.kind = Provenance::hand_written;
  } else {
    codec_fail("provenance kind must be 'hand-written' or 'searched'");
  }
  if (jprov.contains("note")) {
    if (!jprov.at("note").is_string()) codec_fail("provenance note must be a string");
    certificate.provenance.note = jprov.at("note").get<std::string>();
  }
  return certificate;
}

}  // namespace nonterm
