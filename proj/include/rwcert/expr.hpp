#pragma once

// Expression language for chart components.
//
// Grammar, lowest to highest precedence:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := atom ('^' unary)?            right-associative
//   atom    := number | name | name '(' expr [',' expr] ')' | '(' expr ')'
//
// Unary minus applied directly to a constant folds into a negative constant,
// so "-2" is a literal while "-t^2" stays neg(pow(t, 2)).

#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rwcert/error.hpp"
#include "rwcert/jet.hpp"

namespace rwcert {

enum class NodeKind { constant, coordinate, parameter, unary, binary };
enum class UnaryFn { neg, sin, cos, tan, sinh, cosh, tanh, exp, ln, sqrt };
enum class BinaryFn { add, sub, mul, div, pow };

struct ExprNode {
  NodeKind kind = NodeKind::constant;
  double constant = 0.0;
  int index = -1;  // coordinate or parameter slot
  UnaryFn unary = UnaryFn::neg;
  BinaryFn binary = BinaryFn::add;
  std::shared_ptr<const ExprNode> lhs;  // unary operand or left operand
  std::shared_ptr<const ExprNode> rhs;
  std::size_t begin = 0;  // source span [begin, end)
  std::size_t end = 0;
};

using NodePtr = std::shared_ptr<const ExprNode>;

/// Names an expression may reference. Coordinates shadow parameters.
struct SymbolTable {
  std::vector<std::string> coords;
  std::vector<std::string> params;

  std::optional<int> coordinate(std::string_view name) const {
    for (std::size_t i = 0; i < coords.size(); ++i)
      if (coords[i] == name) return static_cast<int>(i);
    return std::nullopt;
  }
  std::optional<int> parameter(std::string_view name) const {
    for (std::size_t i = 0; i < params.size(); ++i)
      if (params[i] == name) return static_cast<int>(i);
    return std::nullopt;
  }
};

/// Immutable parsed expression with its source text.
class Expr {
 public:
  Expr() = default;
  Expr(NodePtr root, std::string source) : root_(std::move(root)), source_(std::move(source)) {}

  const ExprNode& root() const { return *root_; }
  const NodePtr& root_ptr() const { return root_; }
  const std::string& source() const { return source_; }
  bool empty() const { return !root_; }

  /// True when no coordinate is referenced anywhere in the tree.
  bool is_coordinate_free() const { return root_ && coordinate_free(*root_); }

  static bool coordinate_free(const ExprNode& n) {
    switch (n.kind) {
      case NodeKind::coordinate: return false;
      case NodeKind::constant:
      case NodeKind::parameter: return true;
      case NodeKind::unary: return coordinate_free(*n.lhs);
      case NodeKind::binary: return coordinate_free(*n.lhs) && coordinate_free(*n.rhs);
    }
    return true;
  }

 private:
  NodePtr root_;
  std::string source_;
};

inline bool is_reserved_name(std::string_view name) {
  static constexpr std::string_view kReserved[] = {"sin",  "cos", "tan", "sinh", "cosh", "tanh",
                                                   "exp",  "ln",  "sqrt", "pow", "pi"};
  for (auto r : kReserved)
    if (r == name) return true;
  return false;
}

inline bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(s[0])) return false;
  for (char c : s)
    if (!alpha(c) && !digit(c)) return false;
  return true;
}

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, const SymbolTable& symbols) : text_(text), symbols_(symbols) {}

  NodePtr parse() {
    skip_space();
    if (pos_ >= text_.size()) throw SyntaxError("empty expression", pos_);
    NodePtr n = parse_expr();
    skip_space();
    if (pos_ != text_.size()) throw SyntaxError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return n;
  }

 private:
  static NodePtr make_binary(BinaryFn op, NodePtr l, NodePtr r) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::binary;
    n->binary = op;
    n->begin = l->begin;
    n->end = r->end;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }

  static NodePtr make_unary(UnaryFn fn, NodePtr a, std::size_t begin, std::size_t end) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::unary;
    n->unary = fn;
    n->lhs = std::move(a);
    n->begin = begin;
    n->end = end;
    return n;
  }

  static NodePtr make_constant(double c, std::size_t begin, std::size_t end) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::constant;
    n->constant = c;
    n->begin = begin;
    n->end = end;
    return n;
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r'))
      ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) throw SyntaxError(std::string("expected '") + c + "' before end of input", pos_);
      throw SyntaxError(std::string("expected '") + c + "'", pos_);
    }
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (accept('+'))
        lhs = make_binary(BinaryFn::add, lhs, parse_term());
      else if (accept('-'))
        lhs = make_binary(BinaryFn::sub, lhs, parse_term());
      else
        return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*'))
        lhs = make_binary(BinaryFn::mul, lhs, parse_unary());
      else if (accept('/'))
        lhs = make_binary(BinaryFn::div, lhs, parse_unary());
      else
        return lhs;
    }
  }

  NodePtr parse_unary() {
    skip_space();
    const std::size_t start = pos_;
    if (accept('-')) {
      NodePtr operand = parse_unary();
      if (operand->kind == NodeKind::constant) return make_constant(-operand->constant, start, operand->end);
      return make_unary(UnaryFn::neg, operand, start, operand->end);
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (accept('^')) return make_binary(BinaryFn::pow, base, parse_unary());
    return base;
  }

  NodePtr parse_atom() {
    skip_space();
    if (pos_ >= text_.size()) throw SyntaxError("unexpected end of input", pos_);
    const std::size_t start = pos_;
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_expr();
      expect(')');
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
      while (pos_ < text_.size()) {
        const char d = text_[pos_];
        if ((d >= 'a' && d <= 'z') || (d >= 'A' && d <= 'Z') || (d >= '0' && d <= '9') || d == '_')
          ++pos_;
        else
          break;
      }
      const std::string name(text_.substr(start, pos_ - start));
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == '(') return parse_call(name, start);
      return resolve(name, start);
    }
    throw SyntaxError(std::string("unexpected '") + c + "'", pos_);
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_, ++n;
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw SyntaxError("malformed number", start);
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      const std::size_t e = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw SyntaxError("malformed exponent", e);
    }
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) throw SyntaxError("malformed number", start);
    return make_constant(value, start, pos_);
  }

  NodePtr parse_call(const std::string& name, std::size_t start) {
    static constexpr std::pair<std::string_view, UnaryFn> kFunctions[] = {
        {"sin", UnaryFn::sin},   {"cos", UnaryFn::cos},   {"tan", UnaryFn::tan}, {"sinh", UnaryFn::sinh},
        {"cosh", UnaryFn::cosh}, {"tanh", UnaryFn::tanh}, {"exp", UnaryFn::exp}, {"ln", UnaryFn::ln},
        {"sqrt", UnaryFn::sqrt}};
    expect('(');
    if (name == "pow") {
      NodePtr base = parse_expr();
      expect(',');
      NodePtr exponent = parse_expr();
      expect(')');
      auto n = make_binary(BinaryFn::pow, base, exponent);
      auto m = std::make_shared<ExprNode>(*n);
      m->begin = start;
      m->end = pos_;
      return m;
    }
    for (const auto& [fname, fn] : kFunctions) {
      if (fname == name) {
        NodePtr arg = parse_expr();
        expect(')');
        return make_unary(fn, arg, start, pos_);
      }
    }
    throw UnknownIdentifierError(name, start);
  }

  NodePtr resolve(const std::string& name, std::size_t start) {
    auto n = std::make_shared<ExprNode>();
    n->begin = start;
    n->end = pos_;
    if (auto i = symbols_.coordinate(name)) {
      n->kind = NodeKind::coordinate;
      n->index = *i;
      return n;
    }
    if (auto p = symbols_.parameter(name)) {
      n->kind = NodeKind::parameter;
      n->index = *p;
      return n;
    }
    if (name == "pi") {
      n->kind = NodeKind::constant;
      n->constant = std::numbers::pi;
      return n;
    }
    throw UnknownIdentifierError(name, start);
  }

  std::string_view text_;
  const SymbolTable& symbols_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parse `text` against the given names. Throws SyntaxError / UnknownIdentifierError.
inline Expr parse_expr(std::string_view text, const SymbolTable& symbols) {
  detail::Parser parser(text, symbols);
  return Expr(parser.parse(), std::string(text));
}

// ---------------------------------------------------------------------------
// Printing and structural comparison
// ---------------------------------------------------------------------------

inline std::string format_number(double c) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", c);
  return buf;
}

inline std::string to_string(const ExprNode& n, const SymbolTable& symbols) {
  switch (n.kind) {
    case NodeKind::constant: {
      const std::string s = format_number(n.constant);
      return n.constant < 0 ? "(" + s + ")" : s;
    }
    case NodeKind::coordinate: return symbols.coords.at(n.index);
    case NodeKind::parameter: return symbols.params.at(n.index);
    case NodeKind::unary: {
      static constexpr const char* kNames[] = {"-",    "sin",  "cos", "tan", "sinh",
                                               "cosh", "tanh", "exp", "ln",  "sqrt"};
      const std::string arg = to_string(*n.lhs, symbols);
      if (n.unary == UnaryFn::neg) return "(-" + arg + ")";
      return std::string(kNames[static_cast<int>(n.unary)]) + "(" + arg + ")";
    }
    case NodeKind::binary: {
      static constexpr const char* kOps[] = {" + ", " - ", " * ", " / ", "^"};
      return "(" + to_string(*n.lhs, symbols) + kOps[static_cast<int>(n.binary)] + to_string(*n.rhs, symbols) +
             ")";
    }
  }
  return {};
}

inline std::string to_string(const Expr& e, const SymbolTable& symbols) { return to_string(e.root(), symbols); }

/// Same shape, same operators, same references, bit-identical constants.
inline bool structurally_equal(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::constant: return a.constant == b.constant;
    case NodeKind::coordinate:
    case NodeKind::parameter: return a.index == b.index;
    case NodeKind::unary: return a.unary == b.unary && structurally_equal(*a.lhs, *b.lhs);
    case NodeKind::binary:
      return a.binary == b.binary && structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
  }
  return false;
}

inline bool structurally_equal(const Expr& a, const Expr& b) {
  return structurally_equal(a.root(), b.root());
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace detail {

template <class S>
S eval_node(const ExprNode& n, std::span<const S> env, std::span<const double> params, int dim,
            const std::string& source) {
  switch (n.kind) {
    case NodeKind::constant: return ScalarTraits<S>::constant(n.constant, dim);
    case NodeKind::parameter: return ScalarTraits<S>::constant(params[n.index], dim);
    case NodeKind::coordinate: return env[n.index];
    case NodeKind::unary: {
      const S a = eval_node(*n.lhs, env, params, dim, source);
      static constexpr Elementary kMap[] = {Elementary::sin,  Elementary::sin,  Elementary::cos,
                                            Elementary::tan,  Elementary::sinh, Elementary::cosh,
                                            Elementary::tanh, Elementary::exp,  Elementary::ln,
                                            Elementary::sqrt};
      if (n.unary == UnaryFn::neg) return -a;
      try {
        return elementary(kMap[static_cast<int>(n.unary)], a);
      } catch (const DomainError& e) {
        if (e.span_end() != 0) throw;
        throw e.annotated(n.begin, n.end, source.substr(n.begin, n.end - n.begin));
      }
    }
    case NodeKind::binary: {
      try {
        if (n.binary == BinaryFn::pow) {
          const S base = eval_node(*n.lhs, env, params, dim, source);
          if (Expr::coordinate_free(*n.rhs)) {
            const double r = eval_node<double>(*n.rhs, {}, params, 1, source);
            if (r == std::round(r) && std::abs(r) <= 64.0) return integer_power(base, static_cast<long long>(r));
            return elementary(Elementary::pow_const, base, r);
          }
          const S exponent = eval_node(*n.rhs, env, params, dim, source);
          return elementary(Elementary::exp, exponent * elementary(Elementary::ln, base));
        }
        const S a = eval_node(*n.lhs, env, params, dim, source);
        const S b = eval_node(*n.rhs, env, params, dim, source);
        switch (n.binary) {
          case BinaryFn::add: return a + b;
          case BinaryFn::sub: return a - b;
          case BinaryFn::mul: return a * b;
          case BinaryFn::div: return divide(a, b);
          case BinaryFn::pow: break;
        }
      } catch (const DomainError& e) {
        if (e.span_end() != 0) throw;
        throw e.annotated(n.begin, n.end, source.substr(n.begin, n.end - n.begin));
      }
    }
  }
  return ScalarTraits<S>::constant(0.0, dim);
}

}  // namespace detail

/// Evaluate over any scalar type (double, Jet1, Jet3). `env` supplies one
/// value per coordinate; domain errors carry the failing source span.
template <class S>
S eval_expr(const Expr& e, std::span<const S> env, std::span<const double> params) {
  const int dim = env.empty() ? 1 : dim_of(env[0]);
  return detail::eval_node<S>(e.root(), env, params, dim, e.source());
}

}  // namespace rwcert
