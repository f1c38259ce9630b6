#include "nonterm/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace nonterm {

namespace {

const std::string kEndMarker = "\xce\xb5";  // "ε"
const std::string kApSymbol = "ap";

enum class Tok { lparen, lparen_tight, rparen, comma, arrow, newline, ident, end };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

bool ident_char(char c) {
  if (std::isalnum(static_cast<unsigned char>(c))) return true;
  return std::string_view("_'+*/!?.#$%^&~<>=@:;\\-").find(c) != std::string_view::npos ||
         static_cast<unsigned char>(c) >= 0x80;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    bool skipped = false;
    bool saw_newline = false;
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      skipped = true;
      if (text_[pos_] == '\n') {
        saw_newline = true;
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
    if (saw_newline) {
      prev_was_ident_ = false;
      tok_ = {Tok::newline, "\n", line_, col_};
      return;
    }
    int line = line_, col = col_;
    if (pos_ >= text_.size()) {
      tok_ = {Tok::end, "", line, col};
      return;
    }
    char c = text_[pos_];
    if (c == '(') {
      bool tight = prev_was_ident_ && !skipped;
      ++pos_;
      ++col_;
      prev_was_ident_ = false;
      tok_ = {tight ? Tok::lparen_tight : Tok::lparen, "(", line, col};
      return;
    }
    if (c == ')' || c == ',') {
      ++pos_;
      ++col_;
      prev_was_ident_ = false;
      tok_ = {c == ')' ? Tok::rparen : Tok::comma, std::string(1, c), line, col};
      return;
    }
    if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
      pos_ += 2;
      col_ += 2;
      prev_was_ident_ = false;
      tok_ = {Tok::arrow, "->", line, col};
      return;
    }
    if (ident_char(c)) {
      std::string s;
      while (pos_ < text_.size() && ident_char(text_[pos_])) {
        if (text_[pos_] == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
          break;
        }
        s += text_[pos_++];
        ++col_;
      }
      prev_was_ident_ = true;
      tok_ = {Tok::ident, std::move(s), line, col};
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  bool prev_was_ident_ = false;
  Token tok_{Tok::end, "", 1, 1};
};

[[noreturn]] void fail(const Token& at, const std::string& message) {
  throw ParseError(message, at.line, at.column);
}

class TrsParser {
 public:
  explicit TrsParser(std::string_view text) : lex_(text) {}

  Trs parse() {
    skip_newlines();
    while (lex_.peek().kind != Tok::end) {
      Token open = expect_lparen("expected '(' starting a section");
      Token key = lex_.take();
      if (key.kind != Tok::ident) fail(key, "expected section keyword");
      if (key.text == "VAR") {
        parse_var_section();
      } else if (key.text == "SIG") {
        parse_sig_section();
      } else if (key.text == "RULES") {
        parse_rules_section(open);
        saw_rules_ = true;
      } else if (key.text == "COMMENT") {
        skip_balanced();
      } else {
        fail(key, "unsupported section '" + key.text + "'");
      }
      skip_newlines();
    }
    if (!saw_rules_) {
      throw ParseError("missing (RULES ...) section", 1, 1);
    }
    return Trs(std::move(signature_), std::move(rules_), SystemOrigin::term_system);
  }

 private:
  void skip_newlines() {
    while (lex_.peek().kind == Tok::newline) lex_.take();
  }

  Token expect_lparen(const std::string& message) {
    Token t = lex_.take();
    if (t.kind != Tok::lparen && t.kind != Tok::lparen_tight) fail(t, message);
    return t;
  }

  void parse_var_section() {
    for (;;) {
      skip_newlines();
      Token t = lex_.take();
      if (t.kind == Tok::rparen) return;
      if (t.kind != Tok::ident) fail(t, "expected variable name or ')'");
      variables_.insert(t.text);
    }
  }

  void parse_sig_section() {
    for (;;) {
      skip_newlines();
      Token t = lex_.take();
      if (t.kind == Tok::rparen) return;
      if (t.kind != Tok::lparen && t.kind != Tok::lparen_tight) {
        fail(t, "expected '(name arity)' or ')'");
      }
      Token name = lex_.take();
      if (name.kind != Tok::ident) fail(name, "expected symbol name");
      Token arity = lex_.take();
      if (arity.kind != Tok::ident ||
          !std::all_of(arity.text.begin(), arity.text.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        fail(arity, "expected numeric arity");
      }
      declare(name, static_cast<std::uint32_t>(std::stoul(arity.text)));
      Token close = lex_.take();
      if (close.kind != Tok::rparen) fail(close, "expected ')'");
    }
  }

  void declare(const Token& at, std::uint32_t arity, const std::string* name = nullptr) {
    try {
      signature_.add(name ? *name : at.text, arity);
    } catch (const std::invalid_argument& e) {
      fail(at, e.what());
    }
  }

  void parse_rules_section(const Token& open) {
    skip_newlines();
    if (lex_.peek().kind == Tok::rparen) {
      lex_.take();
      return;
    }
    for (;;) {
      TermPtr lhs = parse_term();
      Token arrow = lex_.take();
      if (arrow.kind != Tok::arrow) fail(arrow, "expected '->'");
      skip_newlines();
      TermPtr rhs = parse_term();
      if (lhs->is_variable()) {
        fail(arrow, "rule left-hand side may not be a variable");
      }
      rules_.push_back(Rule{std::move(lhs), std::move(rhs)});
      // Separator: comma, or one-or-more newlines, before the next rule.
      bool separated = false;
      while (lex_.peek().kind == Tok::newline) {
        lex_.take();
        separated = true;
      }
      if (lex_.peek().kind == Tok::comma) {
        lex_.take();
        separated = true;
        skip_newlines();
      }
      if (lex_.peek().kind == Tok::rparen) {
        lex_.take();
        return;
      }
      if (lex_.peek().kind == Tok::end) {
        fail(open, "unclosed RULES section");
      }
      if (!separated) {
        fail(lex_.peek(), "expected ',' or newline between rules");
      }
    }
  }

  TermPtr parse_term() {
    skip_newlines();
    std::vector<TermPtr> atoms;
    atoms.push_back(parse_atom());
    while (lex_.peek().kind == Tok::ident || lex_.peek().kind == Tok::lparen) {
      atoms.push_back(parse_atom());
    }
    TermPtr t = atoms[0];
    for (std::size_t i = 1; i < atoms.size(); ++i) {
      declare(lex_.peek(), 2, &kApSymbol);
      t = Term::app(kApSymbol, {t, atoms[i]});
    }
    return t;
  }

  TermPtr parse_atom() {
    Token t = lex_.take();
    if (t.kind == Tok::lparen || t.kind == Tok::lparen_tight) {
      TermPtr inner = parse_term();
      Token close = lex_.take();
      if (close.kind != Tok::rparen) fail(close, "expected ')'");
      return inner;
    }
    if (t.kind != Tok::ident) fail(t, "expected term");
    if (variables_.count(t.text)) {
      if (lex_.peek().kind == Tok::lparen_tight) {
        fail(lex_.peek(), "variable '" + t.text + "' used as function symbol");
      }
      return Term::var(t.text);
    }
    if (lex_.peek().kind == Tok::lparen_tight) {
      lex_.take();
      std::vector<TermPtr> args;
      skip_newlines();
      if (lex_.peek().kind != Tok::rparen) {
        for (;;) {
          args.push_back(parse_term());
          Token sep = lex_.take();
          if (sep.kind == Tok::rparen) break;
          if (sep.kind != Tok::comma) fail(sep, "expected ',' or ')'");
        }
      } else {
        lex_.take();
      }
      declare(t, static_cast<std::uint32_t>(args.size()));
      return Term::app(t.text, std::move(args));
    }
    declare(t, 0);
    return Term::app(t.text);
  }

  void skip_balanced() {
    int depth = 1;
    while (depth > 0) {
      Token t = lex_.take();
      if (t.kind == Tok::end) fail(t, "unclosed section");
      if (t.kind == Tok::lparen || t.kind == Tok::lparen_tight) ++depth;
      if (t.kind == Tok::rparen) --depth;
    }
  }

  Lexer lex_;
  Signature signature_;
  std::set<std::string> variables_;
  std::vector<Rule> rules_;
  bool saw_rules_ = false;
};

class SrsParser {
 public:
  explicit SrsParser(std::string_view text) : lex_(text) {}

  std::vector<WordRule> parse() {
    std::vector<WordRule> rules;
    bool saw_rules = false;
    skip_newlines();
    while (lex_.peek().kind != Tok::end) {
      Token open = lex_.take();
      if (open.kind != Tok::lparen && open.kind != Tok::lparen_tight) {
        fail(open, "expected '(' starting a section");
      }
      Token key = lex_.take();
      if (key.kind != Tok::ident) fail(key, "expected section keyword");
      if (key.text == "RULES") {
        parse_rules(open, rules);
        saw_rules = true;
      } else if (key.text == "COMMENT") {
        skip_balanced();
      } else {
        fail(key, "unsupported section '" + key.text + "'");
      }
      skip_newlines();
    }
    if (!saw_rules) throw ParseError("missing (RULES ...) section", 1, 1);
    return rules;
  }

 private:
  void skip_newlines() {
    while (lex_.peek().kind == Tok::newline) lex_.take();
  }

  // A token is one letter if single-character; longer tokens split into
  // single-character letters.
  void append_letters(const Token& t, std::vector<std::string>& word) {
    for (char c : t.text) {
      if (static_cast<unsigned char>(c) >= 0x80) {
        fail(t, "identifiers must be ASCII");
      }
      word.emplace_back(1, c);
    }
  }

  void parse_rules(const Token& open, std::vector<WordRule>& rules) {
    skip_newlines();
    if (lex_.peek().kind == Tok::rparen) {
      lex_.take();
      return;
    }
    for (;;) {
      WordRule rule;
      while (lex_.peek().kind == Tok::ident) append_letters(lex_.take(), rule.lhs);
      Token arrow = lex_.take();
      if (arrow.kind != Tok::arrow) fail(arrow, "expected '->'");
      if (rule.lhs.empty()) fail(arrow, "empty left-hand side");
      while (lex_.peek().kind == Tok::ident) append_letters(lex_.take(), rule.rhs);
      rules.push_back(std::move(rule));
      bool separated = false;
      while (lex_.peek().kind == Tok::newline) {
        lex_.take();
        separated = true;
      }
      if (lex_.peek().kind == Tok::comma) {
        lex_.take();
        separated = true;
        skip_newlines();
      }
      if (lex_.peek().kind == Tok::rparen) {
        lex_.take();
        return;
      }
      if (lex_.peek().kind == Tok::end) fail(open, "unclosed RULES section");
      if (!separated) fail(lex_.peek(), "expected ',' or newline between rules");
    }
  }

  void skip_balanced() {
    int depth = 1;
    while (depth > 0) {
      Token t = lex_.take();
      if (t.kind == Tok::end) fail(t, "unclosed section");
      if (t.kind == Tok::lparen || t.kind == Tok::lparen_tight) ++depth;
      if (t.kind == Tok::rparen) --depth;
    }
  }

  Lexer lex_;
};

std::string pick_fresh_variable(const std::set<std::string>& taken) {
  for (const char* c : {"x", "y", "z", "u", "v", "w"}) {
    if (!taken.count(c)) return c;
  }
  for (int i = 0;; ++i) {
    std::string name = "x" + std::to_string(i);
    if (!taken.count(name)) return name;
  }
}

}  // namespace

Trs parse_trs(std::string_view text, InputFormat format) {
  if (format == InputFormat::srs) {
    return embed_srs(SrsParser(text).parse());
  }
  return TrsParser(text).parse();
}

Trs embed_srs(const std::vector<WordRule>& rules) {
  Signature sig;
  std::set<std::string> letters;
  for (const WordRule& r : rules) {
    for (const auto* side : {&r.lhs, &r.rhs}) {
      for (const std::string& letter : *side) {
        if (letter == kEndMarker) {
          throw std::invalid_argument("letter name '" + kEndMarker +
                                      "' is reserved for the end marker");
        }
        sig.add(letter, 1);
        letters.insert(letter);
      }
    }
  }
  sig.add(kEndMarker, 0);
  const std::string var = pick_fresh_variable(letters);

  auto embed_word = [&](const std::vector<std::string>& word) {
    TermPtr t = Term::var(var);
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
      t = Term::app(*it, {t});
    }
    return t;
  };

  std::vector<Rule> term_rules;
  term_rules.reserve(rules.size());
  for (const WordRule& r : rules) {
    term_rules.push_back(Rule{embed_word(r.lhs), embed_word(r.rhs)});
  }
  return Trs(std::move(sig), std::move(term_rules), SystemOrigin::string_system);
}

const std::string& srs_end_marker() { return kEndMarker; }

TermPtr word_to_term(const std::vector<std::string>& letters) {
  TermPtr t = Term::app(kEndMarker);
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
    t = Term::app(*it, {t});
  }
  return t;
}

std::optional<std::vector<std::string>> term_to_word(const TermPtr& t) {
  std::vector<std::string> letters;
  const Term* cur = t.get();
  while (true) {
    if (cur->is_variable()) return std::nullopt;
    if (cur->children().empty()) {
      if (cur->head() != kEndMarker) return std::nullopt;
      return letters;
    }
    if (cur->children().size() != 1) return std::nullopt;
    letters.push_back(cur->head());
    cur = cur->children()[0].get();
  }
}

std::string pretty_print(const Trs& trs) {
  std::ostringstream out;
  out << "(SIG";
  for (const Symbol& s : trs.signature().symbols()) {
    out << " (" << s.name << " " << s.arity << ")";
  }
  out << ")\n";
  std::set<std::string> vars;
  for (const Rule& r : trs.rules()) {
    for (const std::string& v : variables_of(r.lhs)) vars.insert(v);
  }
  out << "(VAR";
  for (const std::string& v : vars) out << " " << v;
  out << ")\n(RULES\n";
  for (const Rule& r : trs.rules()) {
    out << to_string(r.lhs) << " -> " << to_string(r.rhs) << "\n";
  }
  out << ")\n";
  return out.str();
}

std::string display_term(const TermPtr& t, const Trs& trs) {
  if (trs.origin() == SystemOrigin::string_system) {
    if (auto word = term_to_word(t)) {
      if (word->empty()) return kEndMarker;
      std::string s;
      for (const std::string& letter : *word) s += letter;
      return s;
    }
  }
  return to_string(t);
}

}  // namespace nonterm
