// Complex-valued expressions in one free variable `z`.
//
// Grammar (see docs/grammar.md for the EBNF):
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | 'z' | 'i' | 'pi' | 'e' | name '(' sum ')' | '(' sum ')'
//
// There is no implicit multiplication: "2z" is rejected.
#pragma once

#include <cctype>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace supercyc {

using Complex = std::complex<double>;

inline bool is_finite(Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnknownIdentifier, Arity };

  ParseError(Kind kind, std::size_t offset, const std::string& what)
      : std::runtime_error(what + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

enum class NodeKind { Literal, ConstI, ConstPi, ConstE, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

enum class Func { Exp, Log, Sin, Cos, Sqrt, Conj, Abs, Arg, Re, Im };

struct Node {
  NodeKind kind = NodeKind::Literal;
  double value = 0.0;  // Literal only
  Func func = Func::Exp;  // Call only
  std::shared_ptr<const Node> lhs;  // unary operand / call argument / binary left
  std::shared_ptr<const Node> rhs;  // binary right
};

using NodePtr = std::shared_ptr<const Node>;

namespace detail {

struct FuncName {
  std::string_view name;
  Func func;
};

inline constexpr FuncName kFunctions[] = {
    {"exp", Func::Exp},   {"log", Func::Log}, {"sin", Func::Sin}, {"cos", Func::Cos}, {"sqrt", Func::Sqrt},
    {"conj", Func::Conj}, {"abs", Func::Abs}, {"arg", Func::Arg}, {"re", Func::Re},   {"im", Func::Im},
};

inline std::string_view func_name(Func f) {
  for (const auto& entry : kFunctions)
    if (entry.func == f) return entry.name;
  return "?";
}

inline NodePtr make_leaf(NodeKind kind, double value = 0.0) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->value = value;
  return n;
}

inline NodePtr make_node(NodeKind kind, NodePtr lhs, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

inline NodePtr make_call(Func f, NodePtr arg) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Call;
  n->func = f;
  n->lhs = std::move(arg);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError(ParseError::Kind::Syntax, pos_, "empty expression");
    auto node = parse_sum();
    skip_ws();
    if (pos_ != src_.size()) throw ParseError(ParseError::Kind::Syntax, pos_, "unexpected character");
    return node;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr parse_sum() {
    auto lhs = parse_product();
    for (;;) {
      if (accept('+'))
        lhs = make_node(NodeKind::Add, lhs, parse_product());
      else if (accept('-'))
        lhs = make_node(NodeKind::Sub, lhs, parse_product());
      else
        return lhs;
    }
  }

  NodePtr parse_product() {
    auto lhs = parse_unary();
    for (;;) {
      if (accept('*'))
        lhs = make_node(NodeKind::Mul, lhs, parse_unary());
      else if (accept('/'))
        lhs = make_node(NodeKind::Div, lhs, parse_unary());
      else
        return lhs;
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make_node(NodeKind::Neg, parse_unary());
    return parse_power();
  }

  NodePtr parse_power() {
    auto base = parse_primary();
    if (accept('^')) return make_node(NodeKind::Pow, base, parse_unary());
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError(ParseError::Kind::Syntax, pos_, "unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = parse_sum();
      if (!accept(')')) throw ParseError(ParseError::Kind::Syntax, pos_, "expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw ParseError(ParseError::Kind::Syntax, pos_, std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_, ++n;
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw ParseError(ParseError::Kind::Syntax, start, "malformed number");
    // An exponent is only consumed when digits follow; otherwise 'e' is left
    // for the identifier rule (and then rejected as implicit multiplication).
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        pos_ = look;
        digits();
      }
    }
    const std::string text(src_.substr(start, pos_ - start));
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || !std::isfinite(v))
      throw ParseError(ParseError::Kind::Syntax, start, "number out of range");
    return make_leaf(NodeKind::Literal, v);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    if (name == "z") return make_leaf(NodeKind::Var);
    if (name == "i") return make_leaf(NodeKind::ConstI);
    if (name == "pi") return make_leaf(NodeKind::ConstPi);
    if (name == "e") return make_leaf(NodeKind::ConstE);
    for (const auto& entry : kFunctions) {
      if (entry.name != name) continue;
      if (!accept('('))
        throw ParseError(ParseError::Kind::Syntax, pos_, "expected '(' after " + std::string(name));
      skip_ws();
      if (pos_ < src_.size() && src_[pos_] == ')')
        throw ParseError(ParseError::Kind::Arity, pos_, std::string(name) + " takes exactly one argument");
      auto arg = parse_sum();
      skip_ws();
      if (pos_ < src_.size() && src_[pos_] == ',')
        throw ParseError(ParseError::Kind::Arity, pos_, std::string(name) + " takes exactly one argument");
      if (!accept(')')) throw ParseError(ParseError::Kind::Syntax, pos_, "expected ')'");
      return make_call(entry.func, std::move(arg));
    }
    throw ParseError(ParseError::Kind::UnknownIdentifier, start, "unknown identifier '" + std::string(name) + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

// Principal branches: the imaginary zero is normalised to +0 so that the
// negative real axis lands on arg = +pi, never -pi.
inline Complex on_principal_side(Complex z) {
  if (z.imag() == 0.0) return {z.real(), 0.0};
  return z;
}

inline std::optional<Complex> checked(Complex c) {
  if (!is_finite(c)) return std::nullopt;
  return c;
}

inline std::optional<Complex> int_pow(Complex base, long long n) {
  const bool invert = n < 0;
  unsigned long long k = invert ? static_cast<unsigned long long>(-n) : static_cast<unsigned long long>(n);
  Complex result{1.0, 0.0};
  while (k) {
    if (k & 1ULL) result *= base;
    k >>= 1ULL;
    if (k) base *= base;
  }
  if (invert) {
    if (result == Complex{0.0, 0.0}) return std::nullopt;
    result = Complex{1.0, 0.0} / result;
  }
  return checked(result);
}

inline std::optional<Complex> eval_node(const Node& n, Complex z) {
  switch (n.kind) {
    case NodeKind::Literal: return Complex{n.value, 0.0};
    case NodeKind::ConstI: return Complex{0.0, 1.0};
    case NodeKind::ConstPi: return Complex{std::numbers::pi, 0.0};
    case NodeKind::ConstE: return Complex{std::numbers::e, 0.0};
    case NodeKind::Var: return checked(z);
    case NodeKind::Neg: {
      auto a = eval_node(*n.lhs, z);
      if (!a) return std::nullopt;
      return -*a;
    }
    case NodeKind::Add:
    case NodeKind::Sub:
    case NodeKind::Mul:
    case NodeKind::Div:
    case NodeKind::Pow: {
      auto a = eval_node(*n.lhs, z);
      if (!a) return std::nullopt;
      auto b = eval_node(*n.rhs, z);
      if (!b) return std::nullopt;
      switch (n.kind) {
        case NodeKind::Add: return checked(*a + *b);
        case NodeKind::Sub: return checked(*a - *b);
        case NodeKind::Mul: return checked(*a * *b);
        case NodeKind::Div:
          if (*b == Complex{0.0, 0.0}) return std::nullopt;
          return checked(*a / *b);
        default: break;
      }
      // Pow
      if (b->imag() == 0.0 && b->real() == std::nearbyint(b->real()) && std::abs(b->real()) <= 1024.0)
        return int_pow(*a, static_cast<long long>(b->real()));
      if (*a == Complex{0.0, 0.0}) {
        if (b->real() > 0.0) return Complex{0.0, 0.0};
        return std::nullopt;
      }
      return checked(std::exp(*b * std::log(on_principal_side(*a))));
    }
    case NodeKind::Call: {
      auto a = eval_node(*n.lhs, z);
      if (!a) return std::nullopt;
      const Complex v = on_principal_side(*a);
      switch (n.func) {
        case Func::Exp: return checked(std::exp(v));
        case Func::Log:
          if (v == Complex{0.0, 0.0}) return std::nullopt;
          return checked(std::log(v));
        case Func::Sin: return checked(std::sin(v));
        case Func::Cos: return checked(std::cos(v));
        case Func::Sqrt: return checked(std::sqrt(v));
        case Func::Conj: return std::conj(*a);
        case Func::Abs: return checked(Complex{std::abs(v), 0.0});
        case Func::Arg:
          if (v == Complex{0.0, 0.0}) return std::nullopt;
          return Complex{std::arg(v), 0.0};
        case Func::Re: return Complex{v.real(), 0.0};
        case Func::Im: return Complex{v.imag(), 0.0};
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

inline void unparse_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::Literal: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case NodeKind::ConstI: out += 'i'; return;
    case NodeKind::ConstPi: out += "pi"; return;
    case NodeKind::ConstE: out += 'e'; return;
    case NodeKind::Var: out += 'z'; return;
    case NodeKind::Neg:
      out += "(-";
      unparse_node(*n.lhs, out);
      out += ')';
      return;
    case NodeKind::Call:
      out += func_name(n.func);
      out += '(';
      unparse_node(*n.lhs, out);
      out += ')';
      return;
    default: break;
  }
  const char op = n.kind == NodeKind::Add ? '+'
                  : n.kind == NodeKind::Sub ? '-'
                  : n.kind == NodeKind::Mul ? '*'
                  : n.kind == NodeKind::Div ? '/'
                                            : '^';
  out += '(';
  unparse_node(*n.lhs, out);
  out += op;
  unparse_node(*n.rhs, out);
  out += ')';
}

inline bool same_tree(const Node* a, const Node* b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  if (a->kind == NodeKind::Literal && a->value != b->value) return false;
  if (a->kind == NodeKind::Call && a->func != b->func) return false;
  return same_tree(a->lhs.get(), b->lhs.get()) && same_tree(a->rhs.get(), b->rhs.get());
}

inline NodePtr substitute(const NodePtr& n, const NodePtr& replacement) {
  if (!n) return nullptr;
  if (n->kind == NodeKind::Var) return replacement;
  if (!n->lhs && !n->rhs) return n;
  auto copy = std::make_shared<Node>(*n);
  copy->lhs = substitute(n->lhs, replacement);
  copy->rhs = substitute(n->rhs, replacement);
  return copy;
}

}  // namespace detail

/// An immutable parsed expression. Copies share the tree.
class Expression {
 public:
  static Expression parse(std::string_view source) {
    Expression e;
    e.source_ = std::string(source);
    e.root_ = detail::Parser(source).parse();
    return e;
  }

  /// Builds a constant expression (used for points and default functions).
  static Expression constant(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return parse(buf);
  }

  /// Evaluates at z; std::nullopt flags an evaluation failure (division by
  /// zero, log/arg at 0, or a non-finite result).
  std::optional<Complex> eval(Complex z) const { return detail::eval_node(*root_, z); }
  std::optional<Complex> operator()(Complex z) const { return eval(z); }

  /// Fully parenthesised text that parses back to the same tree.
  std::string unparse() const {
    std::string out;
    detail::unparse_node(*root_, out);
    return out;
  }

  /// outer(inner(z)).
  static Expression compose(const Expression& outer, const Expression& inner) {
    Expression e;
    e.root_ = detail::substitute(outer.root_, inner.root_);
    e.source_ = e.unparse();
    return e;
  }

  const std::string& source() const noexcept { return source_; }
  const Node& root() const noexcept { return *root_; }

  friend bool same_structure(const Expression& a, const Expression& b) {
    return detail::same_tree(a.root_.get(), b.root_.get());
  }

 private:
  Expression() = default;
  std::string source_;
  NodePtr root_;
};

/// Symbols, multipliers and test functions are all expressions in z.
using FunctionHandle = Expression;

}  // namespace supercyc
