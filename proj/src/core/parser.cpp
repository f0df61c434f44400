#include "premlog/parser.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

#include "premlog/errors.hpp"

namespace premlog {

namespace {

enum class Tok {
  Ident,     // lowercase-initial name
  Var,       // uppercase-initial name
  Int,
  String,
  LParen,
  RParen,
  Comma,
  Dot,
  Arrow,     // <-
  Lt,
  Le,
  Gt,
  Ge,
  Eq,
  Plus,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t col;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      std::size_t l = line_, c = col_;
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", l, c});
        return out;
      }
      char ch = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(ch))) {
        std::string word;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          word.push_back(get());
        out.push_back({std::isupper(static_cast<unsigned char>(word[0])) ? Tok::Var : Tok::Ident,
                       word, l, c});
      } else if (std::isdigit(static_cast<unsigned char>(ch)) ||
                 (ch == '-' && pos_ + 1 < src_.size() &&
                  std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        std::string num;
        num.push_back(get());
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
          num.push_back(get());
        out.push_back({Tok::Int, num, l, c});
      } else if (ch == '"') {
        get();
        std::string s;
        while (pos_ < src_.size() && src_[pos_] != '"') {
          if (src_[pos_] == '\n') throw ParseError(l, c, "unterminated string literal");
          s.push_back(get());
        }
        if (pos_ >= src_.size()) throw ParseError(l, c, "unterminated string literal");
        get();
        out.push_back({Tok::String, s, l, c});
      } else {
        get();
        switch (ch) {
          case '(': out.push_back({Tok::LParen, "(", l, c}); break;
          case ')': out.push_back({Tok::RParen, ")", l, c}); break;
          case ',': out.push_back({Tok::Comma, ",", l, c}); break;
          case '.': out.push_back({Tok::Dot, ".", l, c}); break;
          case '+': out.push_back({Tok::Plus, "+", l, c}); break;
          case '=': out.push_back({Tok::Eq, "=", l, c}); break;
          case '<':
            if (peek() == '-') {
              get();
              out.push_back({Tok::Arrow, "<-", l, c});
            } else if (peek() == '=') {
              get();
              out.push_back({Tok::Le, "<=", l, c});
            } else {
              out.push_back({Tok::Lt, "<", l, c});
            }
            break;
          case '>':
            if (peek() == '=') {
              get();
              out.push_back({Tok::Ge, ">=", l, c});
            } else {
              out.push_back({Tok::Gt, ">", l, c});
            }
            break;
          default:
            throw ParseError(l, c, std::string("unexpected character '") + ch + "'");
        }
      }
    }
  }

 private:
  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

  char get() {
    char ch = src_[pos_++];
    if (ch == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return ch;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char ch = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(ch))) {
        get();
      } else if (ch == '%' || (ch == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/')) {
        while (pos_ < src_.size() && src_[pos_] != '\n') get();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program run() {
    std::vector<Rule> rules;
    std::set<std::string> pushed;
    while (cur().kind != Tok::End) {
      if (cur().kind == Tok::Dot) {
        advance();
        const Token& name = expect(Tok::Ident, "directive name");
        if (name.text != "prem") fail(name, "unknown directive ." + name.text);
        pushed.insert(expect(Tok::Ident, "predicate name").text);
        expect(Tok::Dot, "'.'");
        continue;
      }
      rules.push_back(parse_rule());
    }
    return Program::build(std::move(rules), std::move(pushed), std::move(symbols_));
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& lookahead(std::size_t k) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  const Token& advance() { return toks_[pos_++]; }

  [[noreturn]] static void fail(const Token& t, const std::string& msg) {
    throw ParseError(t.line, t.col, msg);
  }

  const Token& expect(Tok kind, const char* what) {
    if (cur().kind != kind)
      fail(cur(), std::string("expected ") + what + ", found '" +
                      (cur().kind == Tok::End ? std::string("end of input") : cur().text) + "'");
    return advance();
  }

  Value parse_int(const Token& t) {
    Value v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size())
      fail(t, "integer literal out of range: " + t.text);
    return v;
  }

  Term parse_term() {
    const Token& t = cur();
    switch (t.kind) {
      case Tok::Var: advance(); return Term::variable(t.text);
      case Tok::Int: advance(); return Term::constant(parse_int(t));
      case Tok::String:
      case Tok::Ident: advance(); return Term::constant(symbols_.intern(t.text));
      default: fail(t, "expected a term, found '" + t.text + "'");
    }
  }

  Rule parse_rule() {
    Rule r;
    r.head.predicate = expect(Tok::Ident, "predicate name").text;
    expect(Tok::LParen, "'('");
    for (std::size_t pos = 0;; ++pos) {
      if (cur().kind == Tok::Ident && (cur().text == "min" || cur().text == "max") &&
          lookahead(1).kind == Tok::Lt) {
        const Token& agg_tok = advance();
        advance();
        if (r.head_aggregate) fail(agg_tok, "only one aggregate argument is allowed per head");
        const Token& var = expect(Tok::Var, "cost variable");
        expect(Tok::Gt, "'>'");
        AggregateHead agg;
        agg.kind = agg_tok.text == "min" ? AggregateKind::Min : AggregateKind::Max;
        agg.cost_position = pos;
        r.head_aggregate = agg;
        r.head.args.push_back(Term::variable(var.text));
      } else {
        r.head.args.push_back(parse_term());
      }
      if (cur().kind == Tok::Comma) {
        advance();
        continue;
      }
      expect(Tok::RParen, "',' or ')'");
      break;
    }
    if (r.head_aggregate) {
      for (std::size_t i = 0; i < r.head.args.size(); ++i)
        if (i != r.head_aggregate->cost_position) r.head_aggregate->groupby_positions.push_back(i);
    }
    if (cur().kind == Tok::Arrow) {
      advance();
      parse_goal(r);
      while (cur().kind == Tok::Comma) {
        advance();
        parse_goal(r);
      }
    }
    expect(Tok::Dot, "'.' at end of rule");
    return r;
  }

  void parse_goal(Rule& r) {
    if (cur().kind == Tok::Ident && lookahead(1).kind == Tok::LParen) {
      const Token& start = cur();
      Atom a;
      a.predicate = advance().text;
      advance();
      a.args.push_back(parse_term());
      while (cur().kind == Tok::Comma) {
        advance();
        a.args.push_back(parse_term());
      }
      expect(Tok::RParen, "',' or ')'");
      if (a.predicate == "h" && cur().kind == Tok::Eq) {
        advance();
        if (r.guard) fail(start, "only one partition guard is allowed per rule");
        PartitionGuard g;
        g.args = std::move(a.args);
        const Token& w = cur();
        if (w.kind == Tok::Int) {
          Value v = parse_int(advance());
          if (v < 0) fail(w, "worker id must be non-negative");
          g.worker = static_cast<std::size_t>(v);
        } else if (w.kind == Tok::Ident) {
          advance();
        } else {
          fail(w, "expected worker id after 'h(...) ='");
        }
        r.guard = std::move(g);
        return;
      }
      r.body.push_back(std::move(a));
      return;
    }

    const Token& start = cur();
    Term lhs = parse_term();
    Tok op = cur().kind;
    switch (op) {
      case Tok::Eq: {
        advance();
        if (!lhs.is_variable()) {
          r.comparisons.push_back({lhs, CompareOp::Eq, parse_term()});
          return;
        }
        Arithmetic a;
        a.target = lhs.name();
        a.addends.push_back(parse_term());
        while (cur().kind == Tok::Plus) {
          advance();
          a.addends.push_back(parse_term());
        }
        r.arithmetic.push_back(std::move(a));
        return;
      }
      case Tok::Lt:
      case Tok::Le:
        advance();
        r.comparisons.push_back({lhs, op == Tok::Lt ? CompareOp::Lt : CompareOp::Le, parse_term()});
        return;
      case Tok::Gt:
      case Tok::Ge: {
        advance();
        Term rhs = parse_term();
        r.comparisons.push_back({rhs, op == Tok::Gt ? CompareOp::Lt : CompareOp::Le, lhs});
        return;
      }
      default:
        fail(start, "expected an atom, comparison or arithmetic goal");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  SymbolTable symbols_;
};

bool plain_identifier(std::string_view s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return s != "min" && s != "max";
}

std::string term_text(const Term& t, const SymbolTable* symbols) {
  if (t.is_variable()) return t.name();
  if (symbols) {
    if (auto name = symbols->name_of(t.value())) {
      if (plain_identifier(*name)) return std::string(*name);
      return "\"" + std::string(*name) + "\"";
    }
  }
  return std::to_string(t.value());
}

}  // namespace

Program parse_program(std::string_view text) { return Parser(Lexer(text).run()).run(); }

std::string print_rule(const Rule& r, const SymbolTable* symbols) {
  std::ostringstream os;
  os << r.head.predicate << '(';
  for (std::size_t i = 0; i < r.head.args.size(); ++i) {
    if (i) os << ", ";
    if (r.head_aggregate && r.head_aggregate->cost_position == i)
      os << to_string(r.head_aggregate->kind) << '<' << term_text(r.head.args[i], symbols) << '>';
    else
      os << term_text(r.head.args[i], symbols);
  }
  os << ')';

  std::vector<std::string> goals;
  for (const auto& a : r.body) {
    std::string g = a.predicate + "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      if (i) g += ", ";
      g += term_text(a.args[i], symbols);
    }
    goals.push_back(g + ")");
  }
  for (const auto& a : r.arithmetic) {
    std::string g = a.target + " = ";
    for (std::size_t i = 0; i < a.addends.size(); ++i) {
      if (i) g += " + ";
      g += term_text(a.addends[i], symbols);
    }
    goals.push_back(g);
  }
  for (const auto& c : r.comparisons) {
    const char* op = c.op == CompareOp::Lt ? " < " : c.op == CompareOp::Le ? " <= " : " = ";
    goals.push_back(term_text(c.lhs, symbols) + op + term_text(c.rhs, symbols));
  }
  if (r.guard) {
    std::string g = "h(";
    for (std::size_t i = 0; i < r.guard->args.size(); ++i) {
      if (i) g += ", ";
      g += term_text(r.guard->args[i], symbols);
    }
    g += ") = ";
    g += r.guard->worker ? std::to_string(*r.guard->worker) : std::string("i");
    goals.push_back(g);
  }
  if (!goals.empty()) {
    os << " <- ";
    for (std::size_t i = 0; i < goals.size(); ++i) {
      if (i) os << ", ";
      os << goals[i];
    }
  }
  os << '.';
  return os.str();
}

std::string print_program(const Program& p) {
  std::ostringstream os;
  for (const auto& pred : p.prem_pushed()) os << ".prem " << pred << ".\n";
  for (const auto& r : p.rules()) os << print_rule(r, &p.symbols()) << '\n';
  return os.str();
}

}  // namespace premlog
