#include <array>
#include <charconv>
#include <utility>

#include "greenlb/error.hpp"
#include "greenlb/policy.hpp"

namespace greenlb {

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace policy {
namespace {

struct Spelling {
  std::string_view text;
  Terminal terminal;
};

constexpr std::array<Spelling, 15> kSpellings = {{
    {"ID", Terminal::Id},
    {"numServers", Terminal::NumServers},
    {"queueSize", Terminal::QueueSize},
    {"stateOn", Terminal::StateOn},
    {"stateSleep", Terminal::StateSleep},
    {"stateSuspend", Terminal::StateSuspend},
    {"stateWakeup", Terminal::StateWakeup},
    {"powerOn", Terminal::PowerOn},
    {"powerSleep", Terminal::PowerSleep},
    {"powerSuspend", Terminal::PowerSuspend},
    {"powerWakeup", Terminal::PowerWakeup},
    {"timeWakeup", Terminal::TimeWakeup},
    {"timeSuspend", Terminal::TimeSuspend},
    {"timeOutTime", Terminal::TimeOutTime},
    {"random", Terminal::Random},
}};

enum class Tok { Ident, Int, String, LParen, RParen, Plus, Minus, Star, Slash, Mod, End };

struct Token {
  Tok kind;
  std::string_view text;
  std::size_t line;
  std::size_t column;
};

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_blank();
    const std::size_t line = line_, col = column_, start = pos_;
    if (pos_ >= src_.size()) return {Tok::End, {}, line, col};
    const char c = src_[pos_];
    if (is_ident_start(c)) {
      while (pos_ < src_.size() && is_ident_char(src_[pos_])) advance();
      auto text = src_.substr(start, pos_ - start);
      return {text == "mod" ? Tok::Mod : Tok::Ident, text, line, col};
    }
    if (is_digit(c)) {
      while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
      if (pos_ < src_.size() && (src_[pos_] == '.' || is_ident_start(src_[pos_]))) {
        throw ParseError("malformed integer literal", line, col);
      }
      return {Tok::Int, src_.substr(start, pos_ - start), line, col};
    }
    if (c == '"') {
      advance();
      while (pos_ < src_.size() && src_[pos_] != '"') {
        if (src_[pos_] == '\n') break;
        advance();
      }
      if (pos_ >= src_.size() || src_[pos_] != '"') {
        throw ParseError("unterminated string literal", line, col);
      }
      advance();
      return {Tok::String, src_.substr(start + 1, pos_ - start - 2), line, col};
    }
    advance();
    switch (c) {
      case '(': return {Tok::LParen, "(", line, col};
      case ')': return {Tok::RParen, ")", line, col};
      case '+': return {Tok::Plus, "+", line, col};
      case '-': return {Tok::Minus, "-", line, col};
      case '*': return {Tok::Star, "*", line, col};
      case '/': return {Tok::Slash, "/", line, col};
      case '%': return {Tok::Mod, "%", line, col};
      default: break;
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "'", line, col);
  }

 private:
  void advance() {
    const char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
      // Columns count code points; UTF-8 continuation bytes do not advance.
      ++column_;
    }
  }

  void skip_blank() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text), cur_(lexer_.next()) {}

  Expr parse() {
    if (cur_.kind == Tok::End) error("empty policy expression");
    Expr e = additive();
    if (cur_.kind != Tok::End) error("unexpected '" + std::string(cur_.text) + "'");
    return e;
  }

 private:
  [[noreturn]] void error(const std::string& msg) const {
    throw ParseError(msg, cur_.line, cur_.column);
  }

  Token take() {
    Token t = cur_;
    cur_ = lexer_.next();
    return t;
  }

  void expect(Tok kind, const char* what) {
    if (cur_.kind != kind) {
      error(std::string("expected ") + what +
            (cur_.kind == Tok::End ? " at end of input" : " before '" + std::string(cur_.text) + "'"));
    }
    take();
  }

  Expr additive() {
    Expr lhs = multiplicative();
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      const auto op = take().kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
      lhs = Expr(Node{Binary{op, std::move(lhs), multiplicative()}});
    }
    return lhs;
  }

  Expr multiplicative() {
    Expr lhs = unary();
    while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash || cur_.kind == Tok::Mod) {
      const Tok k = take().kind;
      const auto op = k == Tok::Star ? BinaryOp::Mul : k == Tok::Slash ? BinaryOp::Div : BinaryOp::Mod;
      lhs = Expr(Node{Binary{op, std::move(lhs), unary()}});
    }
    return lhs;
  }

  Expr unary() {
    if (cur_.kind == Tok::Minus) {
      take();
      return Expr(Node{Neg{unary()}});
    }
    return primary();
  }

  Expr primary() {
    switch (cur_.kind) {
      case Tok::Int: {
        std::int64_t v = 0;
        const auto text = cur_.text;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
          error("integer literal out of range");
        }
        take();
        return Expr(Node{IntLit{v}});
      }
      case Tok::LParen: {
        take();
        Expr inner = additive();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Ident: return identifier();
      case Tok::End: error("unexpected end of input");
      default: error("unexpected '" + std::string(cur_.text) + "'");
    }
  }

  Expr identifier() {
    const Token tok = take();
    if (tok.text == "dspace") {
      expect(Tok::LParen, "'('");
      if (cur_.kind != Tok::String) error("dspace expects a string literal");
      const Token name = take();
      if (name.text.empty()) throw ParseError("dspace name must be non-empty", name.line, name.column);
      expect(Tok::RParen, "')'");
      return Expr(Node{DSpace{std::string(name.text)}});
    }
    if (tok.text == "id") return Expr(Node{Terminal::Id});
    for (const auto& s : kSpellings) {
      if (s.text == tok.text) return Expr(Node{s.terminal});
    }
    throw ParseError("unknown identifier '" + std::string(tok.text) + "'", tok.line, tok.column);
  }

  Lexer lexer_;
  Token cur_;
};

int precedence(const Expr& e) {
  if (const auto* b = std::get_if<Binary>(&e.node().value)) {
    return (b->op == BinaryOp::Add || b->op == BinaryOp::Sub) ? 1 : 2;
  }
  if (std::holds_alternative<Neg>(e.node().value)) return 3;
  return 4;
}

std::string_view op_text(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "mod";
  }
  return "?";
}

std::string_view op_name(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "Add";
    case BinaryOp::Sub: return "Sub";
    case BinaryOp::Mul: return "Mul";
    case BinaryOp::Div: return "Div";
    case BinaryOp::Mod: return "Mod";
  }
  return "?";
}

std::string_view terminal_name(Terminal t) {
  constexpr std::array<std::string_view, 15> names = {
      "Id",         "NumServers",  "QueueSize",    "StateOn",     "StateSleep",
      "StateSuspend", "StateWakeup", "PowerOn",    "PowerSleep",  "PowerSuspend",
      "PowerWakeup", "TimeWakeup", "TimeSuspend", "TimeOutTime", "Random"};
  return names[static_cast<std::size_t>(t)];
}

void print(const Expr& e, std::string& out) {
  std::visit(
      [&out](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Terminal>) {
          out += spelling(n);
        } else if constexpr (std::is_same_v<T, IntLit>) {
          out += std::to_string(n.value);
        } else if constexpr (std::is_same_v<T, DSpace>) {
          out += "dspace(\"" + n.name + "\")";
        } else if constexpr (std::is_same_v<T, Neg>) {
          out += '-';
          const bool paren = precedence(n.operand) < 3;
          if (paren) out += '(';
          print(n.operand, out);
          if (paren) out += ')';
        } else {
          const int p = (n.op == BinaryOp::Add || n.op == BinaryOp::Sub) ? 1 : 2;
          const bool lp = precedence(n.lhs) < p;
          const bool rp = precedence(n.rhs) <= p;
          if (lp) out += '(';
          print(n.lhs, out);
          if (lp) out += ')';
          out += ' ';
          out += op_text(n.op);
          out += ' ';
          if (rp) out += '(';
          print(n.rhs, out);
          if (rp) out += ')';
        }
      },
      e.node().value);
}

void sexpr(const Expr& e, std::string& out) {
  std::visit(
      [&out](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Terminal>) {
          out += terminal_name(n);
        } else if constexpr (std::is_same_v<T, IntLit>) {
          out += std::to_string(n.value);
        } else if constexpr (std::is_same_v<T, DSpace>) {
          out += "DSpace(\"" + n.name + "\")";
        } else if constexpr (std::is_same_v<T, Neg>) {
          out += "Neg(";
          sexpr(n.operand, out);
          out += ')';
        } else {
          out += op_name(n.op);
          out += '(';
          sexpr(n.lhs, out);
          out += ", ";
          sexpr(n.rhs, out);
          out += ')';
        }
      },
      e.node().value);
}

void collect_names(const Expr& e, std::vector<std::string>& names) {
  std::visit(
      [&names](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, DSpace>) {
          for (const auto& existing : names) {
            if (existing == n.name) return;
          }
          names.push_back(n.name);
        } else if constexpr (std::is_same_v<T, Neg>) {
          collect_names(n.operand, names);
        } else if constexpr (std::is_same_v<T, Binary>) {
          collect_names(n.lhs, names);
          collect_names(n.rhs, names);
        }
      },
      e.node().value);
}

}  // namespace

std::string_view spelling(Terminal t) noexcept {
  for (const auto& s : kSpellings) {
    if (s.terminal == t) return s.text;
  }
  return "?";
}

Expr parse_policy(std::string_view text) { return Parser(text).parse(); }

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

std::string to_sexpr(const Expr& e) {
  std::string out;
  sexpr(e, out);
  return out;
}

std::vector<std::string> dspace_names(const Expr& e) {
  std::vector<std::string> names;
  collect_names(e, names);
  return names;
}

}  // namespace policy
}  // namespace greenlb
