#include "levikern/expr.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <vector>

namespace levikern {

namespace {

enum class Op {
  kConst,
  kVar,  // slot index 0..3 -> x1 x2 z1 z2
  kNeg,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kPow,
  kFun1,
  kFun2,
};

using Fun1 = double (*)(double);
using Fun2 = double (*)(double, double);

double fn_sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }
double fn_min(double a, double b) { return a < b ? a : b; }
double fn_max(double a, double b) { return a > b ? a : b; }

}  // namespace

struct Expression::Node {
  Op op;
  double value = 0.0;
  int slot = 0;
  Fun1 f1 = nullptr;
  Fun2 f2 = nullptr;
  std::shared_ptr<const Node> a, b;

  double eval(const double* slots) const {
    switch (op) {
      case Op::kConst: return value;
      case Op::kVar: return slots[slot];
      case Op::kNeg: return -a->eval(slots);
      case Op::kAdd: return a->eval(slots) + b->eval(slots);
      case Op::kSub: return a->eval(slots) - b->eval(slots);
      case Op::kMul: return a->eval(slots) * b->eval(slots);
      case Op::kDiv: return a->eval(slots) / b->eval(slots);
      case Op::kPow: return std::pow(a->eval(slots), b->eval(slots));
      case Op::kFun1: return f1(a->eval(slots));
      case Op::kFun2: return f2(a->eval(slots), b->eval(slots));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

struct Parser {
  const std::string& s;
  std::size_t pos = 0;

  explicit Parser(const std::string& text) : s(text) {}

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  bool consume(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("expression parse error at position " +
                                std::to_string(pos) + ": " + what + " in '" + s + "'");
  }

  NodePtr make(Expression::Node n) {
    return std::make_shared<const Expression::Node>(std::move(n));
  }

  NodePtr number() {
    skip();
    std::size_t end = pos;
    while (end < s.size() &&
           (std::isdigit(static_cast<unsigned char>(s[end])) || s[end] == '.' ||
            s[end] == 'e' || s[end] == 'E' ||
            ((s[end] == '+' || s[end] == '-') && end > pos &&
             (s[end - 1] == 'e' || s[end - 1] == 'E'))))
      ++end;
    double v = 0.0;
    try {
      v = std::stod(s.substr(pos, end - pos));
    } catch (...) {
      fail("bad number");
    }
    pos = end;
    return make({Op::kConst, v, 0, nullptr, nullptr, nullptr, nullptr});
  }

  NodePtr identifier() {
    skip();
    std::size_t end = pos;
    while (end < s.size() && (std::isalnum(static_cast<unsigned char>(s[end])) || s[end] == '_'))
      ++end;
    std::string name = s.substr(pos, end - pos);
    pos = end;
    if (name == "pi") return make({Op::kConst, M_PI, 0, nullptr, nullptr, nullptr, nullptr});
    if (name == "e") return make({Op::kConst, M_E, 0, nullptr, nullptr, nullptr, nullptr});
    if (name == "x" || name == "x1") return var(0);
    if (name == "x2") return var(1);
    if (name == "z" || name == "z1") return var(2);
    if (name == "z2") return var(3);

    static const std::pair<const char*, Fun1> funs1[] = {
        {"sin", std::sin},   {"cos", std::cos},   {"tan", std::tan},
        {"tanh", std::tanh}, {"exp", std::exp},   {"log", std::log},
        {"sqrt", std::sqrt}, {"abs", std::fabs},  {"sign", fn_sign},
    };
    static const std::pair<const char*, Fun2> funs2[] = {
        {"min", fn_min}, {"max", fn_max}, {"pow", std::pow}};

    for (auto& [fname, f] : funs1) {
      if (name == fname) {
        if (!consume('(')) fail("expected '(' after " + name);
        NodePtr arg = expr();
        if (!consume(')')) fail("expected ')'");
        return make({Op::kFun1, 0.0, 0, f, nullptr, arg, nullptr});
      }
    }
    for (auto& [fname, f] : funs2) {
      if (name == fname) {
        if (!consume('(')) fail("expected '(' after " + name);
        NodePtr a = expr();
        if (!consume(',')) fail("expected ','");
        NodePtr b = expr();
        if (!consume(')')) fail("expected ')'");
        return make({Op::kFun2, 0.0, 0, nullptr, f, a, b});
      }
    }
    fail("unknown identifier '" + name + "'");
  }

  NodePtr var(int slot) {
    return make({Op::kVar, 0.0, slot, nullptr, nullptr, nullptr, nullptr});
  }

  NodePtr primary() {
    skip();
    if (pos >= s.size()) fail("unexpected end");
    char c = s[pos];
    if (c == '(') {
      ++pos;
      NodePtr e = expr();
      if (!consume(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected character");
  }

  // '^' binds tighter than unary minus: -x^2 == -(x^2)
  NodePtr unary() {
    skip();
    if (pos < s.size() && s[pos] == '-') {
      ++pos;
      return make({Op::kNeg, 0.0, 0, nullptr, nullptr, unary(), nullptr});
    }
    if (pos < s.size() && s[pos] == '+') {
      ++pos;
      return unary();
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    skip();
    if (pos < s.size() && s[pos] == '^') {
      ++pos;
      NodePtr ex = unary();  // right-associative
      return make({Op::kPow, 0.0, 0, nullptr, nullptr, base, ex});
    }
    return base;
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      skip();
      if (pos < s.size() && s[pos] == '*') {
        ++pos;
        lhs = make({Op::kMul, 0.0, 0, nullptr, nullptr, lhs, unary()});
      } else if (pos < s.size() && s[pos] == '/') {
        ++pos;
        lhs = make({Op::kDiv, 0.0, 0, nullptr, nullptr, lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      skip();
      if (pos < s.size() && s[pos] == '+') {
        ++pos;
        lhs = make({Op::kAdd, 0.0, 0, nullptr, nullptr, lhs, term()});
      } else if (pos < s.size() && s[pos] == '-') {
        ++pos;
        lhs = make({Op::kSub, 0.0, 0, nullptr, nullptr, lhs, term()});
      } else {
        return lhs;
      }
    }
  }
};

}  // namespace

Expression::Expression() = default;
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;
Expression::Expression(const Expression&) = default;
Expression& Expression::operator=(const Expression&) = default;
Expression::~Expression() = default;

Expression Expression::parse(const std::string& text) {
  Parser p(text);
  Expression e;
  e.text_ = text;
  e.root_ = p.expr();
  p.skip();
  if (p.pos != text.size()) p.fail("trailing input");
  return e;
}

double Expression::eval(const Point& x, const Point& z) const {
  require(root_ != nullptr, "Expression: empty");
  double slots[4] = {x[0], x[1], z[0], z[1]};
  return root_->eval(slots);
}

}  // namespace levikern
