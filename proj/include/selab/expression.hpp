#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <string>

#include "selab/common.hpp"

namespace selab::expression {

// Minimal arithmetic expression grammar for config-driven densities and
// profiles: + - * / ^, sin, cos, sqrt, dist_boundary, variables x and y,
// constant pi.
class Expression {
public:
  struct Node {
    enum class Kind { number, var_x, var_y, dist_boundary, add, sub, mul, div, pow, neg, sin, cos, sqrt } kind;
    double value = 0.0;
    std::unique_ptr<Node> a, b;
  };

  static Expression parse(const std::string& text);

  double eval(double x, double y, int dim) const {
    if (!root_) throw Error("empty expression");
    return eval_node(*root_, x, y, dim);
  }

  const std::string& text() const { return text_; }

private:
  static double eval_node(const Node& n, double x, double y, int dim) {
    using K = Node::Kind;
    switch (n.kind) {
      case K::number: return n.value;
      case K::var_x: return x;
      case K::var_y: return y;
      case K::dist_boundary: {
        double d = std::min(x, 1.0 - x);
        if (dim == 2) d = std::min(d, std::min(y, 1.0 - y));
        return d;
      }
      case K::add: return eval_node(*n.a, x, y, dim) + eval_node(*n.b, x, y, dim);
      case K::sub: return eval_node(*n.a, x, y, dim) - eval_node(*n.b, x, y, dim);
      case K::mul: return eval_node(*n.a, x, y, dim) * eval_node(*n.b, x, y, dim);
      case K::div: return eval_node(*n.a, x, y, dim) / eval_node(*n.b, x, y, dim);
      case K::pow: return std::pow(eval_node(*n.a, x, y, dim), eval_node(*n.b, x, y, dim));
      case K::neg: return -eval_node(*n.a, x, y, dim);
      case K::sin: return std::sin(eval_node(*n.a, x, y, dim));
      case K::cos: return std::cos(eval_node(*n.a, x, y, dim));
      case K::sqrt: return std::sqrt(eval_node(*n.a, x, y, dim));
    }
    throw Error("corrupt expression tree");
  }

  std::shared_ptr<const Node> root_;  // shared so parsed expressions copy cheaply
  std::string text_;
};

namespace detail {

class Parser {
public:
  explicit Parser(const std::string& s) : s_(s) {}

  std::unique_ptr<Expression::Node> run() {
    auto node = parse_sum();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing input");
    return node;
  }

private:
  using Node = Expression::Node;
  using K = Node::Kind;

  [[noreturn]] void fail(const std::string& why) const {
    throw Error("expression error at position " + std::to_string(pos_) + ": " + why);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  static std::unique_ptr<Node> make(K kind, std::unique_ptr<Node> a = nullptr,
                                    std::unique_ptr<Node> b = nullptr) {
    auto n = std::make_unique<Node>();
    n->kind = kind;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  std::unique_ptr<Node> parse_sum() {
    auto node = parse_product();
    while (true) {
      if (consume('+')) node = make(K::add, std::move(node), parse_product());
      else if (consume('-')) node = make(K::sub, std::move(node), parse_product());
      else return node;
    }
  }

  std::unique_ptr<Node> parse_product() {
    auto node = parse_unary();
    while (true) {
      if (consume('*')) node = make(K::mul, std::move(node), parse_unary());
      else if (consume('/')) node = make(K::div, std::move(node), parse_unary());
      else return node;
    }
  }

  std::unique_ptr<Node> parse_unary() {
    if (consume('-')) return make(K::neg, parse_unary());
    return parse_power();
  }

  std::unique_ptr<Node> parse_power() {
    auto base = parse_primary();
    if (consume('^')) return make(K::pow, std::move(base), parse_unary());
    return base;
  }

  std::unique_ptr<Node> parse_primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto node = parse_sum();
      if (!consume(')')) fail("expected ')'");
      return node;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    fail(std::string("unexpected character '") + c + "'");
  }

  std::unique_ptr<Node> parse_number() {
    size_t end = pos_;
    while (end < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
            s_[end] == 'e' || s_[end] == 'E' ||
            ((s_[end] == '+' || s_[end] == '-') && (s_[end - 1] == 'e' || s_[end - 1] == 'E'))))
      ++end;
    auto n = make(K::number);
    try {
      size_t used = 0;
      n->value = std::stod(s_.substr(pos_, end - pos_), &used);
      if (used != end - pos_) fail("bad number");
    } catch (const std::exception&) {
      fail("bad number");
    }
    pos_ = end;
    return n;
  }

  std::unique_ptr<Node> parse_ident() {
    size_t end = pos_;
    while (end < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
      ++end;
    std::string name = s_.substr(pos_, end - pos_);
    pos_ = end;
    if (name == "x") return make(K::var_x);
    if (name == "y") return make(K::var_y);
    if (name == "dist_boundary") return make(K::dist_boundary);
    if (name == "pi") {
      auto n = make(K::number);
      n->value = M_PI;
      return n;
    }
    K fn;
    if (name == "sin") fn = K::sin;
    else if (name == "cos") fn = K::cos;
    else if (name == "sqrt") fn = K::sqrt;
    else fail("unknown symbol '" + name + "'");
    if (!consume('(')) fail("expected '(' after function name");
    auto arg = parse_sum();
    if (!consume(')')) fail("expected ')'");
    return make(fn, std::move(arg));
  }

  const std::string& s_;
  size_t pos_ = 0;
};

}  // namespace detail

inline Expression Expression::parse(const std::string& text) {
  Expression e;
  e.root_ = detail::Parser(text).run();
  e.text_ = text;
  return e;
}

}  // namespace selab::expression
