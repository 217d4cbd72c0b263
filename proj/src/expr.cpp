#include "carnot/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <set>

namespace carnot::expr {

ParseError::ParseError(const std::string& message, int line, int col)
    : std::runtime_error(message + " at line " + std::to_string(line) + ", col " + std::to_string(col)),
      message_(message),
      line_(line),
      col_(col) {}

namespace {

NodePtr num(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::number;
  n->value = v;
  return n;
}

NodePtr leaf(Op op, int index = 0) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->index = index;
  return n;
}

NodePtr node(Op op, std::vector<NodePtr> args, std::string fn = {}) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args = std::move(args);
  n->fn = std::move(fn);
  return n;
}

int arity(const std::string& fn) {
  if (fn == "sqrt" || fn == "abs" || fn == "exp" || fn == "log" || fn == "sign") return 1;
  if (fn == "min" || fn == "max") return 2;
  return -1;
}

// Parser ---------------------------------------------------------------------

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, comma, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  double value = 0.0;
  int line = 1;
  int col = 1;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
          j = k;
        }
      }
      const auto res = std::from_chars(src.data() + i, src.data() + j, t.value);
      if (res.ec != std::errc() || res.ptr != src.data() + j) {
        throw ParseError("malformed number '" + std::string(src.substr(i, j - i)) + "'", line, col);
      }
      t.kind = Tok::number;
      t.text = std::string(src.substr(i, j - i));
      out.push_back(t);
      advance(j - i);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Tok::ident;
      t.text = std::string(src.substr(i, j - i));
      out.push_back(t);
      advance(j - i);
      continue;
    }
    switch (c) {
      case '+': t.kind = Tok::plus; break;
      case '-': t.kind = Tok::minus; break;
      case '*': t.kind = Tok::star; break;
      case '/': t.kind = Tok::slash; break;
      case '^': t.kind = Tok::caret; break;
      case '(': t.kind = Tok::lparen; break;
      case ')': t.kind = Tok::rparen; break;
      case ',': t.kind = Tok::comma; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    t.text = std::string(1, c);
    out.push_back(t);
    advance(1);
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  NodePtr parse_all() {
    NodePtr e = expression();
    const Token& t = peek();
    if (t.kind == Tok::rparen) throw ParseError("unbalanced ')'", t.line, t.col);
    if (t.kind != Tok::end) throw ParseError("unexpected '" + t.text + "'", t.line, t.col);
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  NodePtr expression() {
    NodePtr lhs = term();
    while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
      const Op op = take().kind == Tok::plus ? Op::add : Op::sub;
      lhs = node(op, {lhs, term()});
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (peek().kind == Tok::star || peek().kind == Tok::slash) {
      const Op op = take().kind == Tok::star ? Op::mul : Op::div;
      lhs = node(op, {lhs, unary()});
    }
    return lhs;
  }

  NodePtr unary() {
    if (peek().kind == Tok::minus) {
      take();
      return node(Op::neg, {unary()});
    }
    if (peek().kind == Tok::plus) {
      take();
      return unary();
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (peek().kind == Tok::caret) {
      take();
      return node(Op::pow, {base, unary()});
    }
    return base;
  }

  NodePtr primary() {
    const Token t = take();
    switch (t.kind) {
      case Tok::number:
        return num(t.value);
      case Tok::lparen: {
        NodePtr e = expression();
        const Token& close = peek();
        if (close.kind != Tok::rparen) {
          throw ParseError("unbalanced '(' opened at col " + std::to_string(t.col), close.line, close.col);
        }
        take();
        return e;
      }
      case Tok::ident:
        return identifier(t);
      case Tok::end:
        throw ParseError("unexpected end of input", t.line, t.col);
      case Tok::rparen:
        throw ParseError("unbalanced ')'", t.line, t.col);
      default:
        throw ParseError("unexpected '" + t.text + "'", t.line, t.col);
    }
  }

  NodePtr identifier(const Token& t) {
    if (peek().kind == Tok::lparen) {
      const int want = arity(t.text);
      if (want < 0) throw ParseError("unknown function " + t.text, t.line, t.col);
      take();
      std::vector<NodePtr> args;
      if (peek().kind != Tok::rparen) {
        args.push_back(expression());
        while (peek().kind == Tok::comma) {
          take();
          args.push_back(expression());
        }
      }
      const Token& close = peek();
      if (close.kind != Tok::rparen) throw ParseError("unbalanced '(' in call to " + t.text, close.line, close.col);
      take();
      if (static_cast<int>(args.size()) != want) {
        throw ParseError(t.text + " expects " + std::to_string(want) + " argument(s), got " +
                             std::to_string(args.size()),
                         t.line, t.col);
      }
      return node(Op::call, std::move(args), t.text);
    }
    if (t.text == "s") return leaf(Op::s);
    if (t.text == "rho") return leaf(Op::rho);
    if (t.text == "pi") return num(std::numbers::pi);
    if (t.text.size() >= 2 && (t.text[0] == 'x' || t.text[0] == 'y') &&
        std::all_of(t.text.begin() + 1, t.text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) &&
        t.text[1] != '0') {
      const int k = std::stoi(t.text.substr(1));
      return leaf(t.text[0] == 'x' ? Op::first : Op::second, k - 1);
    }
    if (arity(t.text) >= 0) throw ParseError(t.text + " expects " + std::to_string(arity(t.text)) + " argument(s), got none", t.line, t.col);
    throw ParseError("unknown identifier " + t.text, t.line, t.col);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// Folding constructors -----------------------------------------------------------

bool is_num(const NodePtr& a, double v) { return a->op == Op::number && a->value == v; }

NodePtr add(NodePtr a, NodePtr b) {
  if (is_num(a, 0.0)) return b;
  if (is_num(b, 0.0)) return a;
  if (a->op == Op::number && b->op == Op::number) return num(a->value + b->value);
  return node(Op::add, {a, b});
}

NodePtr neg(NodePtr a) {
  if (a->op == Op::number) return num(-a->value);
  if (a->op == Op::neg) return a->args[0];
  return node(Op::neg, {a});
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (is_num(b, 0.0)) return a;
  if (is_num(a, 0.0)) return neg(b);
  if (a->op == Op::number && b->op == Op::number) return num(a->value - b->value);
  return node(Op::sub, {a, b});
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (is_num(a, 0.0) || is_num(b, 0.0)) return num(0.0);
  if (is_num(a, 1.0)) return b;
  if (is_num(b, 1.0)) return a;
  if (a->op == Op::number && b->op == Op::number) return num(a->value * b->value);
  return node(Op::mul, {a, b});
}

NodePtr div(NodePtr a, NodePtr b) {
  if (is_num(a, 0.0)) return num(0.0);
  if (is_num(b, 1.0)) return a;
  return node(Op::div, {a, b});
}

NodePtr pow(NodePtr a, NodePtr b) {
  if (is_num(b, 1.0)) return a;
  if (is_num(b, 0.0)) return num(1.0);
  return node(Op::pow, {a, b});
}

NodePtr call(const std::string& fn, std::vector<NodePtr> args) { return node(Op::call, std::move(args), fn); }

bool constant(const NodePtr& a) {
  if (a->op == Op::first || a->op == Op::second || a->op == Op::s || a->op == Op::rho) return false;
  return std::all_of(a->args.begin(), a->args.end(), constant);
}

NodePtr derive(const NodePtr& e, int k, int m) {
  switch (e->op) {
    case Op::number:
      return num(0.0);
    case Op::first:
      return num(k == e->index ? 1.0 : 0.0);
    case Op::second:
      return num(k == m + e->index ? 1.0 : 0.0);
    case Op::s:
      if (k >= m) return num(0.0);
      return div(leaf(Op::first, k), leaf(Op::s));
    case Op::rho: {
      const NodePtr rho3 = pow(leaf(Op::rho), num(3.0));
      if (k < m) return div(mul(pow(leaf(Op::s), num(2.0)), leaf(Op::first, k)), rho3);
      return div(leaf(Op::second, k - m), mul(num(2.0), rho3));
    }
    case Op::neg:
      return neg(derive(e->args[0], k, m));
    case Op::add:
      return add(derive(e->args[0], k, m), derive(e->args[1], k, m));
    case Op::sub:
      return sub(derive(e->args[0], k, m), derive(e->args[1], k, m));
    case Op::mul: {
      const NodePtr& a = e->args[0];
      const NodePtr& b = e->args[1];
      return add(mul(derive(a, k, m), b), mul(a, derive(b, k, m)));
    }
    case Op::div: {
      const NodePtr& a = e->args[0];
      const NodePtr& b = e->args[1];
      return div(sub(mul(derive(a, k, m), b), mul(a, derive(b, k, m))), pow(b, num(2.0)));
    }
    case Op::pow: {
      const NodePtr& a = e->args[0];
      const NodePtr& b = e->args[1];
      const NodePtr da = derive(a, k, m);
      if (constant(b)) {
        const NodePtr lowered = b->op == Op::number ? num(b->value - 1.0) : sub(b, num(1.0));
        return mul(mul(b, pow(a, lowered)), da);
      }
      const NodePtr db = derive(b, k, m);
      return mul(e, add(mul(db, call("log", {a})), div(mul(b, da), a)));
    }
    case Op::call: {
      const NodePtr& a = e->args[0];
      const NodePtr da = derive(a, k, m);
      if (e->fn == "sqrt") return div(da, mul(num(2.0), e));
      if (e->fn == "exp") return mul(e, da);
      if (e->fn == "log") return div(da, a);
      if (e->fn == "abs") return mul(call("sign", {a}), da);
      if (e->fn == "sign") return num(0.0);
      const NodePtr& b = e->args[1];
      const NodePtr db = derive(b, k, m);
      const NodePtr jump = mul(call("sign", {sub(a, b)}), sub(da, db));
      const NodePtr mean = add(da, db);
      return div(e->fn == "min" ? sub(mean, jump) : add(mean, jump), num(2.0));
    }
  }
  return num(0.0);
}

double evaluate(const NodePtr& e, const Point& p, double s, double rho) {
  switch (e->op) {
    case Op::number:
      return e->value;
    case Op::first:
      if (e->index >= p.m()) throw EvalError("x" + std::to_string(e->index + 1) + " is outside the group");
      return p[e->index];
    case Op::second:
      if (e->index >= p.n()) throw EvalError("y" + std::to_string(e->index + 1) + " is outside the group");
      return p[p.m() + e->index];
    case Op::s:
      return s;
    case Op::rho:
      return rho;
    case Op::neg:
      return -evaluate(e->args[0], p, s, rho);
    case Op::add:
      return evaluate(e->args[0], p, s, rho) + evaluate(e->args[1], p, s, rho);
    case Op::sub:
      return evaluate(e->args[0], p, s, rho) - evaluate(e->args[1], p, s, rho);
    case Op::mul:
      return evaluate(e->args[0], p, s, rho) * evaluate(e->args[1], p, s, rho);
    case Op::div:
      return evaluate(e->args[0], p, s, rho) / evaluate(e->args[1], p, s, rho);
    case Op::pow: {
      const double a = evaluate(e->args[0], p, s, rho);
      const double b = evaluate(e->args[1], p, s, rho);
      if (a < 0.0 && b != std::floor(b)) throw EvalError("negative base with non-integer exponent");
      return std::pow(a, b);
    }
    case Op::call: {
      const double a = evaluate(e->args[0], p, s, rho);
      if (e->fn == "sqrt") {
        if (a < 0.0) throw EvalError("sqrt of a negative number");
        return std::sqrt(a);
      }
      if (e->fn == "abs") return std::abs(a);
      if (e->fn == "exp") return std::exp(a);
      if (e->fn == "log") {
        if (a < 0.0) throw EvalError("log of a negative number");
        return std::log(a);
      }
      if (e->fn == "sign") return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
      const double b = evaluate(e->args[1], p, s, rho);
      return e->fn == "min" ? std::min(a, b) : std::max(a, b);
    }
  }
  return 0.0;
}

// Printing ------------------------------------------------------------------------

int precedence(const NodePtr& e) {
  switch (e->op) {
    case Op::add:
    case Op::sub:
      return 1;
    case Op::mul:
    case Op::div:
      return 2;
    case Op::neg:
      return 3;
    case Op::pow:
      return 4;
    case Op::number:
      return e->value < 0.0 ? 3 : 5;
    default:
      return 5;
  }
}

void print(const NodePtr& e, std::string& out);

void print_wrapped(const NodePtr& e, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(e, out);
  if (wrap) out += ')';
}

void print(const NodePtr& e, std::string& out) {
  switch (e->op) {
    case Op::number: {
      if (e->value == std::numbers::pi) {
        out += "pi";
        return;
      }
      char buf[64];
      const auto res = std::to_chars(buf, buf + sizeof buf, e->value);
      out.append(buf, res.ptr);
      return;
    }
    case Op::first:
      out += "x" + std::to_string(e->index + 1);
      return;
    case Op::second:
      out += "y" + std::to_string(e->index + 1);
      return;
    case Op::s:
      out += "s";
      return;
    case Op::rho:
      out += "rho";
      return;
    case Op::neg:
      out += '-';
      print_wrapped(e->args[0], precedence(e->args[0]) < 3, out);
      return;
    case Op::pow:
      print_wrapped(e->args[0], precedence(e->args[0]) < 5, out);
      out += '^';
      print_wrapped(e->args[1], precedence(e->args[1]) < 3, out);
      return;
    case Op::call:
      out += e->fn + "(";
      for (std::size_t i = 0; i < e->args.size(); ++i) {
        if (i) out += ", ";
        print(e->args[i], out);
      }
      out += ')';
      return;
    default: {
      const int p = precedence(e);
      print_wrapped(e->args[0], precedence(e->args[0]) < p, out);
      switch (e->op) {
        case Op::add: out += " + "; break;
        case Op::sub: out += " - "; break;
        case Op::mul: out += "*"; break;
        default: out += "/"; break;
      }
      print_wrapped(e->args[1], precedence(e->args[1]) <= p, out);
    }
  }
}

void scan(const NodePtr& e, std::set<std::string>& flags, int& max_x, int& max_y) {
  switch (e->op) {
    case Op::first:
      max_x = std::max(max_x, e->index + 1);
      break;
    case Op::second:
      max_y = std::max(max_y, e->index + 1);
      break;
    case Op::s:
      flags.insert("kink at s=0");
      break;
    case Op::rho:
      flags.insert("kink at rho=0");
      break;
    case Op::pow: {
      const NodePtr& a = e->args[0];
      const NodePtr& b = e->args[1];
      // s^(2k) and rho^(4k) are polynomial.
      const bool integer = b->op == Op::number && b->value == std::floor(b->value) && b->value > 0.0;
      if (a->op == Op::s && integer && std::fmod(b->value, 2.0) == 0.0) {
        scan(b, flags, max_x, max_y);
        return;
      }
      if (a->op == Op::rho && integer && std::fmod(b->value, 4.0) == 0.0) {
        scan(b, flags, max_x, max_y);
        return;
      }
      if (!(b->op == Op::number && b->value == std::floor(b->value) && b->value >= 0.0) && !constant(a)) {
        flags.insert("kink where a power base vanishes");
      }
      break;
    }
    case Op::call:
      if (e->fn == "abs") flags.insert("kink where abs argument vanishes");
      if (e->fn == "sign") flags.insert("jump where sign argument vanishes");
      if (e->fn == "min" || e->fn == "max") flags.insert("kink where " + e->fn + " arguments are equal");
      if (e->fn == "sqrt") flags.insert("kink where sqrt argument vanishes");
      if (e->fn == "log") flags.insert("singular where log argument vanishes");
      break;
    default:
      break;
  }
  for (const auto& a : e->args) scan(a, flags, max_x, max_y);
}

}  // namespace

bool same_tree(const NodePtr& a, const NodePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->op != b->op || a->args.size() != b->args.size()) return false;
  if (a->op == Op::number && a->value != b->value) return false;
  if ((a->op == Op::first || a->op == Op::second) && a->index != b->index) return false;
  if (a->op == Op::call && a->fn != b->fn) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i) {
    if (!same_tree(a->args[i], b->args[i])) return false;
  }
  return true;
}

Expression parse(std::string_view text) { return Expression(Parser(lex(text)).parse_all()); }

Expression parse(std::string_view text, int m, int n) {
  Expression e = parse(text);
  if (e.max_first() > m) throw ParseError("unknown identifier x" + std::to_string(e.max_first()) + " (m = " + std::to_string(m) + ")", 1, 1);
  if (e.max_second() > n) throw ParseError("unknown identifier y" + std::to_string(e.max_second()) + " (n = " + std::to_string(n) + ")", 1, 1);
  return e;
}

int Expression::max_first() const {
  std::set<std::string> flags;
  int mx = 0, my = 0;
  scan(root_, flags, mx, my);
  return mx;
}

int Expression::max_second() const {
  std::set<std::string> flags;
  int mx = 0, my = 0;
  scan(root_, flags, mx, my);
  return my;
}

double Expression::eval(const Point& p) const {
  const Vec xi = p.first();
  const double s = xi.norm();
  const double rho = std::pow(std::pow(s, 4) + p.second().squaredNorm(), 0.25);
  return evaluate(root_, p, s, rho);
}

Expression Expression::derivative(int k, int m) const { return Expression(derive(root_, k, m)); }

std::vector<Expression> Expression::gradient(int m, int n) const {
  std::vector<Expression> out;
  for (int k = 0; k < m + n; ++k) out.push_back(derivative(k, m));
  return out;
}

std::vector<std::string> Expression::kinks() const {
  std::set<std::string> flags;
  int mx = 0, my = 0;
  scan(root_, flags, mx, my);
  return {flags.begin(), flags.end()};
}

std::string Expression::to_string() const {
  std::string out;
  print(root_, out);
  return out;
}

bool Expression::operator==(const Expression& other) const { return same_tree(root_, other.root_); }

ScalarField to_field(const Expression& e, const GroupSpec& spec) {
  const auto grad = e.gradient(spec.m(), spec.n());
  ScalarField f;
  f.eval = [e](const Point& p) { return e.eval(p); };
  f.egrad = [grad](const Point& p) {
    Vec g(static_cast<int>(grad.size()));
    for (std::size_t k = 0; k < grad.size(); ++k) g[static_cast<int>(k)] = grad[k].eval(p);
    return g;
  };
  return f;
}

}  // namespace carnot::expr
