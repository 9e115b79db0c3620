#include "masharp/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <variant>

#include "masharp/error.hpp"

namespace masharp {

struct Expression::Node {
  enum class Op { literal, coord, add, sub, mul, div, neg, exp, sin, cos, log, pow };
  Op op = Op::literal;
  double value = 0.0;
  int axis = 0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;

  double eval(const Point& x) const {
    switch (op) {
      case Op::literal: return value;
      case Op::coord: return x[axis];
      case Op::add: return lhs->eval(x) + rhs->eval(x);
      case Op::sub: return lhs->eval(x) - rhs->eval(x);
      case Op::mul: return lhs->eval(x) * rhs->eval(x);
      case Op::div: return lhs->eval(x) / rhs->eval(x);
      case Op::neg: return -lhs->eval(x);
      case Op::exp: return std::exp(lhs->eval(x));
      case Op::sin: return std::sin(lhs->eval(x));
      case Op::cos: return std::cos(lhs->eval(x));
      case Op::log: return std::log(lhs->eval(x));
      case Op::pow: return std::pow(lhs->eval(x), rhs->eval(x));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

// Recursive descent:
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | '+' unary | atom
//   atom   := number | x1..x3 | func '(' args ')' | '(' expr ')'
class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << "expression '" << s_ << "': " << msg << " at position " << pos_;
    throw ExpressionError(os.str());
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (accept('+'))
        lhs = make(Op::add, lhs, term());
      else if (accept('-'))
        lhs = make(Op::sub, lhs, term());
      else
        return lhs;
    }
  }
  NodePtr term() {
    NodePtr lhs = unary();
    while (true) {
      if (accept('*'))
        lhs = make(Op::mul, lhs, unary());
      else if (accept('/'))
        lhs = make(Op::div, lhs, unary());
      else
        return lhs;
    }
  }
  NodePtr unary() {
    if (accept('-')) return make(Op::neg, unary());
    if (accept('+')) return unary();
    return atom();
  }
  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (accept('(')) {
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<Expression::Node>();
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "x1" || name == "x2" || name == "x3") {
        auto n = std::make_shared<Expression::Node>();
        n->op = Op::coord;
        n->axis = name[1] - '1';
        return n;
      }
      Op op;
      if (name == "exp")
        op = Op::exp;
      else if (name == "sin")
        op = Op::sin;
      else if (name == "cos")
        op = Op::cos;
      else if (name == "log")
        op = Op::log;
      else if (name == "pow")
        op = Op::pow;
      else {
        pos_ = start;
        fail("unknown identifier '" + name + "'");
      }
      expect('(');
      NodePtr a = expr();
      NodePtr b;
      if (op == Op::pow) {
        expect(',');
        b = expr();
      }
      expect(')');
      return make(op, a, b);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.root_ = Parser(text).parse();
  e.text_ = text;
  return e;
}

Expression Expression::constant(double value) {
  std::ostringstream os;
  os.precision(17);
  os << value;
  return parse(os.str());
}

double Expression::operator()(const Point& x) const { return root_->eval(x); }

}  // namespace masharp
