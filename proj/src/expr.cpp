#include "ftsim/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace ftsim {

namespace {

struct Node {
  enum class Kind { constant, time, add, sub, mul, div, neg, sin, cos, exp } kind;
  double value = 0.0;
  std::unique_ptr<Node> lhs, rhs;
};

double eval(const Node& n, double t) {
  using K = Node::Kind;
  switch (n.kind) {
    case K::constant: return n.value;
    case K::time: return t;
    case K::add: return eval(*n.lhs, t) + eval(*n.rhs, t);
    case K::sub: return eval(*n.lhs, t) - eval(*n.rhs, t);
    case K::mul: return eval(*n.lhs, t) * eval(*n.rhs, t);
    case K::div: return eval(*n.lhs, t) / eval(*n.rhs, t);
    case K::neg: return -eval(*n.lhs, t);
    case K::sin: return std::sin(eval(*n.lhs, t));
    case K::cos: return std::cos(eval(*n.lhs, t));
    case K::exp: return std::exp(eval(*n.lhs, t));
  }
  return 0.0;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  std::unique_ptr<Node> parse() {
    auto node = expression();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return node;
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("expression '" + text_ + "': " + what + " at column " +
                                std::to_string(pos_ + 1));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::unique_ptr<Node> make(Node::Kind k, std::unique_ptr<Node> l = nullptr,
                             std::unique_ptr<Node> r = nullptr) {
    auto n = std::make_unique<Node>();
    n->kind = k;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }

  std::unique_ptr<Node> expression() {
    auto node = term();
    for (;;) {
      if (consume('+'))
        node = make(Node::Kind::add, std::move(node), term());
      else if (consume('-'))
        node = make(Node::Kind::sub, std::move(node), term());
      else
        return node;
    }
  }

  std::unique_ptr<Node> term() {
    auto node = factor();
    for (;;) {
      if (consume('*'))
        node = make(Node::Kind::mul, std::move(node), factor());
      else if (consume('/'))
        node = make(Node::Kind::div, std::move(node), factor());
      else
        return node;
    }
  }

  std::unique_ptr<Node> factor() {
    if (consume('-')) return make(Node::Kind::neg, factor());
    if (consume('+')) return factor();
    return primary();
  }

  std::unique_ptr<Node> primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto node = expression();
      if (!consume(')')) fail("expected ')'");
      return node;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected character");
  }

  std::unique_ptr<Node> number() {
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    auto n = make(Node::Kind::constant);
    n->value = v;
    return n;
  }

  std::unique_ptr<Node> identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string name = text_.substr(start, pos_ - start);
    if (name == "t") return make(Node::Kind::time);
    Node::Kind kind;
    if (name == "sin")
      kind = Node::Kind::sin;
    else if (name == "cos")
      kind = Node::Kind::cos;
    else if (name == "exp")
      kind = Node::Kind::exp;
    else {
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    if (!consume('(')) fail("expected '(' after function name");
    auto arg = expression();
    if (!consume(')')) fail("expected ')'");
    return make(kind, std::move(arg));
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace

TimeFunction parse_time_expr(const std::string& text) {
  Parser parser(text);
  std::shared_ptr<Node> ast(parser.parse().release());
  return [ast](double t) { return eval(*ast, t); };
}

}  // namespace ftsim
