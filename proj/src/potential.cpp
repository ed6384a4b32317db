#include "floquet/potential.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <cstdio>
#include <utility>

#include "floquet/errors.hpp"

namespace floquet {

namespace ast {

NodePtr number(complex v) { return std::make_shared<const Node>(Node{Kind::Number, v, nullptr, nullptr}); }

NodePtr variable() { return std::make_shared<const Node>(Node{Kind::Variable, {}, nullptr, nullptr}); }

NodePtr unary(Kind k, NodePtr operand) {
  return std::make_shared<const Node>(Node{k, {}, std::move(operand), nullptr});
}

NodePtr binary(Kind k, NodePtr lhs, NodePtr rhs) {
  return std::make_shared<const Node>(Node{k, {}, std::move(lhs), std::move(rhs)});
}

}  // namespace ast

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok type;
  std::size_t pos;  // 1-based
  double number = 0.0;
  std::string text;
};

std::string describe(char c) {
  std::string s = "'";
  s += c;
  s += "'";
  return s;
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    const std::size_t pos = i + 1;
    if (static_cast<unsigned char>(c) > 127) {
      throw ParseError("non-ASCII character at position " + std::to_string(pos), pos);
    }
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    if ((c >= '0' && c <= '9') || c == '.') {
      std::size_t j = i;
      while (j < text.size() && ((text[j] >= '0' && text[j] <= '9') || text[j] == '.')) ++j;
      // Exponent only when followed by digits, so "2exp(x)" still lexes as 2 * exp(x).
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() && text[k] >= '0' && text[k] <= '9') {
          j = k;
          while (j < text.size() && text[j] >= '0' && text[j] <= '9') ++j;
        }
      }
      double value = 0.0;
      const char* first = text.data() + i;
      const char* last = text.data() + j;
      auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc() || ptr != last) {
        throw ParseError("malformed number '" + std::string(first, last) + "' at position " +
                             std::to_string(pos),
                         pos);
      }
      out.push_back({Tok::Number, pos, value, {}});
      i = j;
      continue;
    }
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
      std::size_t j = i;
      while (j < text.size() && ((text[j] >= 'a' && text[j] <= 'z') || (text[j] >= 'A' && text[j] <= 'Z'))) ++j;
      out.push_back({Tok::Ident, pos, 0.0, std::string(text.substr(i, j - i))});
      i = j;
      continue;
    }
    Tok t;
    switch (c) {
      case '+': t = Tok::Plus; break;
      case '-': t = Tok::Minus; break;
      case '*': t = Tok::Star; break;
      case '/': t = Tok::Slash; break;
      case '^': t = Tok::Caret; break;
      case '(': t = Tok::LParen; break;
      case ')': t = Tok::RParen; break;
      case ',': t = Tok::Comma; break;
      default:
        throw ParseError("unknown token " + describe(c) + " at position " + std::to_string(pos), pos);
    }
    out.push_back({t, pos, 0.0, std::string(1, c)});
    ++i;
  }
  out.push_back({Tok::End, text.size() + 1, 0.0, {}});
  return out;
}

// ---------------------------------------------------------------------------
// Recursive-descent parser

bool is_function(const std::string& name) { return name == "cos" || name == "sin" || name == "exp"; }

ast::Kind function_kind(const std::string& name) {
  if (name == "cos") return ast::Kind::Cos;
  if (name == "sin") return ast::Kind::Sin;
  return ast::Kind::Exp;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  ast::NodePtr parse() {
    auto root = expression();
    const Token& t = peek();
    if (t.type == Tok::RParen) fail("unbalanced parenthesis", t.pos);
    if (t.type != Tok::End) fail("unexpected '" + t.text + "'", t.pos);
    return root;
  }

 private:
  const Token& peek() const { return toks_[idx_]; }
  const Token& advance() { return toks_[idx_++]; }

  [[noreturn]] static void fail(const std::string& what, std::size_t pos) {
    throw ParseError(what + " at position " + std::to_string(pos), pos);
  }

  ast::NodePtr expression() {
    auto lhs = term();
    while (peek().type == Tok::Plus || peek().type == Tok::Minus) {
      const auto kind = advance().type == Tok::Plus ? ast::Kind::Add : ast::Kind::Sub;
      lhs = ast::binary(kind, lhs, term());
    }
    return lhs;
  }

  static bool starts_operand(Tok t) { return t == Tok::Number || t == Tok::Ident || t == Tok::LParen; }

  ast::NodePtr term() {
    auto lhs = power();
    for (;;) {
      const Tok t = peek().type;
      if (t == Tok::Star || t == Tok::Slash) {
        advance();
        lhs = ast::binary(t == Tok::Star ? ast::Kind::Mul : ast::Kind::Div, lhs, power());
      } else if (starts_operand(t)) {
        lhs = ast::binary(ast::Kind::Mul, lhs, power());  // juxtaposition: 0.5i, 2x, 2cos(x)
      } else {
        return lhs;
      }
    }
  }

  ast::NodePtr power() {
    auto base = unary_expr();
    if (peek().type == Tok::Caret) {
      advance();
      return ast::binary(ast::Kind::Pow, base, power());
    }
    return base;
  }

  ast::NodePtr unary_expr() {
    if (peek().type == Tok::Minus) {
      advance();
      return ast::unary(ast::Kind::Neg, unary_expr());
    }
    if (peek().type == Tok::Plus) {
      advance();
      return unary_expr();
    }
    return primary();
  }

  ast::NodePtr primary() {
    const Token& t = peek();
    switch (t.type) {
      case Tok::Number:
        advance();
        return ast::number(t.number);
      case Tok::Ident:
        return identifier();
      case Tok::LParen: {
        advance();
        auto inner = expression();
        expect_close();
        return inner;
      }
      case Tok::End:
      case Tok::RParen:
      case Tok::Comma:
      case Tok::Star:
      case Tok::Slash:
      case Tok::Caret:
      case Tok::Plus:
      case Tok::Minus:
        break;
    }
    if (idx_ > 0) {
      const Token& prev = toks_[idx_ - 1];
      const bool prev_is_operator = prev.type == Tok::Plus || prev.type == Tok::Minus ||
                                    prev.type == Tok::Star || prev.type == Tok::Slash ||
                                    prev.type == Tok::Caret;
      if (prev_is_operator) fail("dangling operator '" + prev.text + "'", prev.pos);
    }
    if (t.type == Tok::RParen) fail("unbalanced parenthesis", t.pos);
    if (t.type == Tok::End) fail("expected operand", t.pos);
    fail("unexpected '" + t.text + "'", t.pos);
  }

  ast::NodePtr identifier() {
    const Token& t = advance();
    if (t.text == "x") return ast::variable();
    if (t.text == "i") return ast::number(complex(0.0, 1.0));
    if (t.text == "pi") return ast::number(kPi);
    if (!is_function(t.text)) fail("unknown identifier '" + t.text + "'", t.pos);
    if (peek().type != Tok::LParen) fail("function '" + t.text + "' requires parentheses", peek().pos);
    advance();
    std::vector<ast::NodePtr> args;
    if (peek().type != Tok::RParen) {
      args.push_back(expression());
      while (peek().type == Tok::Comma) {
        advance();
        args.push_back(expression());
      }
    }
    expect_close();
    if (args.size() != 1) {
      fail("function '" + t.text + "' takes 1 argument, got " + std::to_string(args.size()), t.pos);
    }
    return ast::unary(function_kind(t.text), args.front());
  }

  void expect_close() {
    const Token& t = peek();
    if (t.type != Tok::RParen) {
      if (t.type == Tok::End) fail("unbalanced parenthesis", t.pos);
      fail("expected ')' but found '" + t.text + "'", t.pos);
    }
    advance();
  }

  std::vector<Token> toks_;
  std::size_t idx_ = 0;
};

// ---------------------------------------------------------------------------
// Evaluation

complex integer_power(complex base, long n) {
  const bool invert = n < 0;
  unsigned long e = static_cast<unsigned long>(invert ? -n : n);
  complex result(1.0, 0.0);
  while (e != 0) {
    if (e & 1UL) result *= base;
    base *= base;
    e >>= 1;
  }
  return invert ? complex(1.0, 0.0) / result : result;
}

complex eval_node(const ast::Node& n, complex x) {
  using ast::Kind;
  switch (n.kind) {
    case Kind::Number: return n.value;
    case Kind::Variable: return x;
    case Kind::Add: return eval_node(*n.lhs, x) + eval_node(*n.rhs, x);
    case Kind::Sub: return eval_node(*n.lhs, x) - eval_node(*n.rhs, x);
    case Kind::Mul: return eval_node(*n.lhs, x) * eval_node(*n.rhs, x);
    case Kind::Div: return eval_node(*n.lhs, x) / eval_node(*n.rhs, x);
    case Kind::Neg: return -eval_node(*n.lhs, x);
    case Kind::Cos: return std::cos(eval_node(*n.lhs, x));
    case Kind::Sin: return std::sin(eval_node(*n.lhs, x));
    case Kind::Exp: return std::exp(eval_node(*n.lhs, x));
    case Kind::Pow: {
      const complex base = eval_node(*n.lhs, x);
      const complex ex = eval_node(*n.rhs, x);
      if (ex.imag() == 0.0 && std::abs(ex.real()) <= 64.0 && ex.real() == std::trunc(ex.real())) {
        return integer_power(base, static_cast<long>(ex.real()));
      }
      return std::pow(base, ex);
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Printing

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_node(const ast::Node& n, std::string& out) {
  using ast::Kind;
  const auto bin = [&](const char* op) {
    out += '(';
    print_node(*n.lhs, out);
    out += op;
    print_node(*n.rhs, out);
    out += ')';
  };
  const auto fn = [&](const char* name) {
    out += name;
    out += '(';
    print_node(*n.lhs, out);
    out += ')';
  };
  switch (n.kind) {
    case Kind::Number:
      if (n.value.imag() == 0.0) {
        out += "(" + format_double(n.value.real()) + ")";
      } else if (n.value == complex(0.0, 1.0)) {
        out += 'i';
      } else if (n.value.real() == 0.0) {
        out += "((" + format_double(n.value.imag()) + ")*i)";
      } else {
        out += "((" + format_double(n.value.real()) + ")+(" + format_double(n.value.imag()) + ")*i)";
      }
      return;
    case Kind::Variable: out += 'x'; return;
    case Kind::Add: bin("+"); return;
    case Kind::Sub: bin("-"); return;
    case Kind::Mul: bin("*"); return;
    case Kind::Div: bin("/"); return;
    case Kind::Pow: bin("^"); return;
    case Kind::Neg:
      out += "(-";
      print_node(*n.lhs, out);
      out += ')';
      return;
    case Kind::Cos: fn("cos"); return;
    case Kind::Sin: fn("sin"); return;
    case Kind::Exp: fn("exp"); return;
  }
}

ast::NodePtr substitute_variable(const ast::NodePtr& n, const ast::NodePtr& replacement) {
  using ast::Kind;
  switch (n->kind) {
    case Kind::Number: return n;
    case Kind::Variable: return replacement;
    case Kind::Neg:
    case Kind::Cos:
    case Kind::Sin:
    case Kind::Exp: return ast::unary(n->kind, substitute_variable(n->lhs, replacement));
    default:
      return ast::binary(n->kind, substitute_variable(n->lhs, replacement),
                         substitute_variable(n->rhs, replacement));
  }
}

}  // namespace

PotentialExpr::PotentialExpr(ast::NodePtr root, std::string source)
    : root_(std::move(root)), source_(std::move(source)) {}

complex PotentialExpr::evaluate(double x) const { return eval_node(*root_, complex(x, 0.0)); }

complex PotentialExpr::evaluate(complex x) const { return eval_node(*root_, x); }

PotentialExpr parse_potential(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw ParseError("empty potential expression at position 1", 1);
  }
  Parser parser(lex(text));
  return PotentialExpr(parser.parse(), std::string(text));
}

complex eval_potential(const PotentialExpr& p, double x) { return p.evaluate(x); }

std::string to_string(const PotentialExpr& p) {
  std::string out;
  print_node(p.root(), out);
  return out;
}

ValidationReport validate_potential(const PotentialExpr& p, int n_grid, double tol) {
  if (n_grid < 64) throw PreconditionError("validate_potential: n_grid must be >= 64");
  ValidationReport r;
  for (int j = 0; j < n_grid; ++j) {
    const double x = kPi * j / n_grid;
    const complex v = p.evaluate(x);
    r.periodicity_residual = std::max(r.periodicity_residual, std::abs(p.evaluate(x + kPeriod) - v));
    r.pt_residual = std::max(r.pt_residual, std::abs(std::conj(p.evaluate(-x)) - v));
  }
  r.periodic = r.periodicity_residual <= tol;
  r.pt_symmetric = r.pt_residual <= tol;
  return r;
}

PotentialExpr shift_half_period(const PotentialExpr& p) {
  auto shifted_x = ast::binary(ast::Kind::Add, ast::variable(), ast::number(kPi / 2));
  PotentialExpr shifted(substitute_variable(p.root_ptr(), shifted_x), {});
  return PotentialExpr(shifted.root_ptr(), to_string(shifted));
}

complex FourierCoeffs::reconstruct(double x) const {
  complex sum{};
  for (int n = -truncation; n <= truncation; ++n) {
    sum += (*this)[n] * std::polar(1.0, 2.0 * n * x);
  }
  return sum;
}

FourierCoeffs fourier_coefficients(const PotentialExpr& p, int truncation, int n_samples) {
  if (truncation < 1) throw PreconditionError("fourier_coefficients: truncation must be >= 1");
  if (n_samples < 4 * truncation + 4) {
    throw PreconditionError("fourier_coefficients: need n_samples >= 4*truncation + 4");
  }
  std::vector<complex> samples(static_cast<std::size_t>(n_samples));
  for (int j = 0; j < n_samples; ++j) samples[static_cast<std::size_t>(j)] = p.evaluate(kPi * j / n_samples);

  FourierCoeffs fc;
  fc.truncation = truncation;
  fc.coeffs.resize(static_cast<std::size_t>(2 * truncation + 1));
  for (int n = -truncation; n <= truncation; ++n) {
    complex sum{};
    for (int j = 0; j < n_samples; ++j) {
      // Reduce n*j modulo the grid so the phase stays exact for large n*j.
      long m = (static_cast<long>(n) * j) % n_samples;
      if (m < 0) m += n_samples;
      sum += samples[static_cast<std::size_t>(j)] * std::polar(1.0, -2.0 * kPi * static_cast<double>(m) / n_samples);
    }
    fc.coeffs[static_cast<std::size_t>(n + truncation)] = sum / static_cast<double>(n_samples);
  }
  // Aliasing-free coefficients come out at round-off level instead of zero;
  // clear them so structural zeros (triangular Hill matrices) stay exact.
  double scale = 0.0;
  for (const auto& v : samples) scale = std::max(scale, std::abs(v));
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * scale;
  for (auto& c : fc.coeffs) {
    if (std::abs(c) <= floor) c = complex{};
  }
  fc.truncation_warning = std::abs(fc[truncation]) > kFourierTruncationTol ||
                          std::abs(fc[-truncation]) > kFourierTruncationTol;
  return fc;
}

}  // namespace floquet
