#include "masv/prism/encode.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <sstream>

namespace masv::prism {

std::string format_probability(const Rational& p) { return p.to_decimal(17); }

std::vector<std::string> command_labels(const ts::TransitionSystem& ts, const agent::AgentSystem& sys) {
  std::map<std::pair<std::size_t, std::size_t>, std::map<std::string, std::size_t>> ordinals;
  std::vector<std::string> out;
  out.reserve(ts.transitions.size());
  for (const auto& t : ts.transitions) {
    if (!t.decision) {
      out.push_back("loop_" + std::to_string(t.source));
      continue;
    }
    const auto& d = *t.decision;
    auto& seen = ordinals[{d.agent, d.action}];
    auto [it, fresh] = seen.emplace(ts::describe(d, sys), seen.size());
    out.push_back("a" + std::to_string(d.agent) + "_" + sys.actions()[d.action].name + "_" +
                  std::to_string(it->second));
  }
  return out;
}

namespace {

std::string summarize(const ts::JointState& js, const agent::AgentSystem& sys) {
  std::string out;
  for (std::size_t i = 0; i < js.agents.size(); ++i) {
    const auto& ms = js.agents[i];
    if (i) out += " ; ";
    out += sys.agent_name(i) + " {";
    auto beliefs = sys.index().to_strings(ms.beliefs);
    for (std::size_t k = 0; k < beliefs.size(); ++k) out += (k ? "," : "") + beliefs[k];
    out += "} goals=" + std::to_string(ms.goals.size());
    if (ms.busy) out += " busy=" + sys.render_action(ms.busy->action, ms.busy->binding) + "/" +
                        std::to_string(ms.busy->remaining);
  }
  return out;
}

std::string disjunction(const std::vector<std::size_t>& ids) {
  if (ids.empty()) return "false";
  std::string out;
  for (std::size_t k = 0; k < ids.size(); ++k) out += (k ? " | s=" : "s=") + std::to_string(ids[k]);
  return out;
}

}  // namespace

PrismArtifacts encode_prism(const ts::TransitionSystem& ts, const agent::AgentSystem& sys) {
  if (ts.states.empty()) throw EmptySystemError();
  if (ts.labels.size() != ts.states.size()) throw std::invalid_argument("transition system is not labeled");

  PrismArtifacts art;
  const auto labels = command_labels(ts, sys);
  std::ostringstream os;
  os << "// masv: " << ts.states.size() << " states, " << ts.transitions.size() << " transitions\n";
  os << "mdp\n\nmodule system\n";
  os << "  s : [0.." << ts.states.size() - 1 << "] init " << ts.initial << ";\n";
  std::size_t last = ts.states.size();
  for (std::size_t k = 0; k < ts.transitions.size(); ++k) {
    const auto& t = ts.transitions[k];
    if (t.source != last) {
      last = t.source;
      auto& c = art.state_comments[last] = summarize(ts.states[last], sys);
      os << "\n  // s=" << last << ": " << c << "\n";
    }
    os << "  [" << labels[k] << "] s=" << t.source << " -> ";
    for (std::size_t i = 0; i < t.outcomes.size(); ++i) {
      if (i) os << " + ";
      os << format_probability(t.outcomes[i].first) << ":(s'=" << t.outcomes[i].second << ")";
    }
    os << ";\n";
  }
  os << "endmodule\n\n";
  std::vector<std::size_t> safe, goal;
  for (std::size_t i = 0; i < ts.labels.size(); ++i) {
    if (ts.labels[i].safe) safe.push_back(i);
    if (ts.labels[i].goal) goal.push_back(i);
  }
  os << "label \"safe\" = " << disjunction(safe) << ";\n";
  os << "label \"goal\" = " << disjunction(goal) << ";\n";
  art.model_text = os.str();
  art.properties_text = encode_properties();
  return art;
}

std::string encode_properties() {
  return "Pmin=? [ F \"goal\" ]\n"
         "Pmax=? [ F \"goal\" ]\n"
         "Pmax=? [ F !\"safe\" ]\n";
}

// ---------------------------------------------------------------------------
// Subset checker

namespace {

enum class Tok { ident, number, string, punct, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  int line = 1;
  int column = 1;
};

std::vector<Token> tokenize(const std::string& src, Diagnostics& diags) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.compare(i, 2, "//") == 0) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    std::size_t j = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      if (j < src.size() && src[j] == '\'') ++j;
      t.kind = Tok::ident;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      t.kind = Tok::number;
    } else if (c == '"') {
      j = src.find('"', i + 1);
      if (j == std::string::npos) {
        diags.push_back({{i, 1, line, col}, "unterminated string"});
        return out;
      }
      ++j;
      t.kind = Tok::string;
    } else if (src.compare(i, 2, "->") == 0 || src.compare(i, 2, "..") == 0) {
      j = i + 2;
      t.kind = Tok::punct;
    } else if (std::string_view("[]():;=|+!").find(c) != std::string_view::npos) {
      j = i + 1;
      t.kind = Tok::punct;
    } else {
      diags.push_back({{i, 1, line, col}, std::string("unexpected character '") + c + "'"});
      advance(1);
      continue;
    }
    t.text = src.substr(i, j - i);
    advance(j - i);
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = col;
  end.text = "end of input";
  out.push_back(end);
  return out;
}

struct SyntaxFailure {
  Diagnostic diag;
};

class Checker {
 public:
  explicit Checker(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ParsedModel run(Diagnostics& diags) {
    ParsedModel m;
    expect_word("mdp");
    expect_word("module");
    expect(Tok::ident, "module name");
    expect_word("s");
    expect_punct(":");
    expect_punct("[");
    if (integer() != 0) fail(prev(), "state variable must start at 0");
    expect_punct("..");
    m.state_count = integer() + 1;
    expect_punct("]");
    expect_word("init");
    if (integer() != 0) fail(prev(), "initial state must be 0");
    expect_punct(";");
    while (peek().kind == Tok::punct && peek().text == "[") m.commands.push_back(command(m.state_count, diags));
    expect_word("endmodule");
    while (peek().kind == Tok::ident && peek().text == "label") {
      advance();
      const Token& name = expect(Tok::string, "label name");
      std::string key = name.text.substr(1, name.text.size() - 2);
      if (m.labels.count(key)) fail(name, "duplicate label \"" + key + "\"");
      expect_punct("=");
      std::vector<std::size_t> ids;
      if (peek().kind == Tok::ident && peek().text == "false") {
        advance();
      } else {
        for (;;) {
          ids.push_back(state_ref(m.state_count));
          if (!(peek().kind == Tok::punct && peek().text == "|")) break;
          advance();
        }
      }
      expect_punct(";");
      m.labels[key] = std::move(ids);
    }
    if (peek().kind != Tok::end) fail(peek(), "unexpected '" + peek().text + "'");
    for (const char* required : {"safe", "goal"})
      if (!m.labels.count(required)) fail(peek(), std::string("missing label \"") + required + "\"");
    return m;
  }

 private:
  ParsedCommand command(std::size_t n, Diagnostics& diags) {
    ParsedCommand c;
    const Token& open = advance();
    c.label = expect(Tok::ident, "action label").text;
    expect_punct("]");
    c.source = state_ref(n);
    expect_punct("->");
    long double sum = 0;
    for (;;) {
      const Token& p = expect(Tok::number, "probability");
      double v = std::strtod(p.text.c_str(), nullptr);
      if (!(v > 0.0) || v > 1.0 + 1e-9) fail(p, "probability " + p.text + " outside (0,1]");
      expect_punct(":");
      expect_punct("(");
      expect_word("s'");
      expect_punct("=");
      std::size_t target = integer();
      if (target >= n) fail(prev(), "target state " + std::to_string(target) + " out of range");
      expect_punct(")");
      c.outcomes.emplace_back(v, target);
      c.literals.push_back(p.text);
      sum += v;
      if (!(peek().kind == Tok::punct && peek().text == "+")) break;
      advance();
    }
    expect_punct(";");
    if (std::fabs(static_cast<double>(sum) - 1.0) > 1e-9)
      diags.push_back({{0, 0, open.line, open.column}, "command probabilities ≠ 1"});
    return c;
  }

  std::size_t state_ref(std::size_t n) {
    expect_word("s");
    expect_punct("=");
    std::size_t id = integer();
    if (id >= n) fail(prev(), "state " + std::to_string(id) + " out of range");
    return id;
  }

  std::size_t integer() {
    const Token& t = expect(Tok::number, "integer");
    if (t.text.find_first_not_of("0123456789") != std::string::npos) fail(t, "expected integer, got " + t.text);
    return std::stoull(t.text);
  }

  const Token& peek() const { return toks_[pos_]; }
  const Token& prev() const { return toks_[pos_ ? pos_ - 1 : 0]; }
  const Token& advance() {
    const Token& t = toks_[pos_];
    if (t.kind != Tok::end) ++pos_;
    return t;
  }

  const Token& expect(Tok kind, const std::string& what) {
    if (peek().kind != kind) fail(peek(), "expected " + what + ", got '" + peek().text + "'");
    return advance();
  }
  void expect_word(const std::string& w) {
    if (peek().kind != Tok::ident || peek().text != w) fail(peek(), "expected '" + w + "', got '" + peek().text + "'");
    advance();
  }
  void expect_punct(const std::string& p) {
    if (peek().kind != Tok::punct || peek().text != p) fail(peek(), "expected '" + p + "', got '" + peek().text + "'");
    advance();
  }

  [[noreturn]] void fail(const Token& t, std::string msg) {
    throw SyntaxFailure{{{0, 0, t.line, t.column}, std::move(msg)}};
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

SyntaxResult check_prism_syntax(const std::string& text) {
  SyntaxResult r;
  auto toks = tokenize(text, r.diagnostics);
  if (!r.diagnostics.empty()) return r;
  try {
    r.model = Checker(std::move(toks)).run(r.diagnostics);
  } catch (const SyntaxFailure& f) {
    r.diagnostics.push_back(f.diag);
  }
  r.ok = r.diagnostics.empty();
  return r;
}

}  // namespace masv::prism
