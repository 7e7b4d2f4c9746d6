#include "cf/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <system_error>

#include "cf/error.hpp"

namespace cf {

namespace detail {

struct ExprNode {
  ExprOp op = ExprOp::Const;
  Scalar value{};
  int var = 0;
  std::int64_t exponent = 0;
  std::vector<Expr> args;
  std::uint64_t mask = 0;
  std::size_t hash = 0;
};

}  // namespace detail

namespace {

constexpr std::int64_t kExponentLimit = std::int64_t{1} << 31;

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

void check_exponent(std::int64_t n) {
  if (n > kExponentLimit || n < -kExponentLimit) {
    throw Error(ErrorKind::ExponentOverflow, "exponent " + std::to_string(n) + " exceeds 2^31");
  }
}

Scalar int_power(Scalar base, std::int64_t n) {
  if (n < 0) {
    if (base == Scalar(0.0)) throw Error(ErrorKind::Pole, "zero raised to a negative power");
    if (base.imag() == 0.0) return Scalar(1.0 / std::pow(base.real(), static_cast<double>(-n)), 0.0);
    return Scalar(1.0) / int_power(base, -n);
  }
  if (base.imag() == 0.0) return Scalar(std::pow(base.real(), static_cast<double>(n)), 0.0);
  Scalar result(1.0);
  Scalar b = base;
  auto m = static_cast<std::uint64_t>(n);
  while (m) {
    if (m & 1U) result *= b;
    b *= b;
    m >>= 1U;
  }
  return result;
}

Scalar apply_function(ExprOp op, Scalar a) {
  if (a.imag() == 0.0) {
    switch (op) {
      case ExprOp::Sin: return Scalar(std::sin(a.real()), 0.0);
      case ExprOp::Cos: return Scalar(std::cos(a.real()), 0.0);
      case ExprOp::Exp: return Scalar(std::exp(a.real()), 0.0);
      default: break;
    }
  }
  switch (op) {
    case ExprOp::Sin: return std::sin(a);
    case ExprOp::Cos: return std::cos(a);
    case ExprOp::Exp: return std::exp(a);
    default: break;
  }
  return a;
}

}  // namespace

// Simplifying node constructors.
struct ExprBuilder {
  using Node = detail::ExprNode;

  static Expr finish(Node n) {
    std::size_t h = mix(std::hash<int>{}(static_cast<int>(n.op)), 0);
    switch (n.op) {
      case ExprOp::Const:
        h = mix(h, std::hash<double>{}(n.value.real()));
        h = mix(h, std::hash<double>{}(n.value.imag()));
        break;
      case ExprOp::Var:
        h = mix(h, static_cast<std::size_t>(n.var));
        n.mask = std::uint64_t{1} << n.var;
        break;
      case ExprOp::Pow:
        h = mix(h, std::hash<std::int64_t>{}(n.exponent));
        break;
      default:
        break;
    }
    for (const auto& a : n.args) {
      h = mix(h, a.hash());
      n.mask |= a.variable_mask();
    }
    n.hash = h;
    return Expr(std::make_shared<const Node>(std::move(n)));
  }

  static Expr constant(Scalar v) {
    Node n;
    n.op = ExprOp::Const;
    n.value = v;
    return finish(std::move(n));
  }

  static Expr variable(int index) {
    Node n;
    n.op = ExprOp::Var;
    n.var = index;
    return finish(std::move(n));
  }

  static Expr raw(ExprOp op, std::vector<Expr> args, std::int64_t exponent = 0) {
    Node n;
    n.op = op;
    n.args = std::move(args);
    n.exponent = exponent;
    return finish(std::move(n));
  }

  // (coefficient, rest) where rest is 1 for constants.
  static std::pair<Scalar, Expr> split_coefficient(const Expr& e) {
    if (e.op() == ExprOp::Const) return {e.value(), constant(1.0)};
    if (e.op() == ExprOp::Mul && e.args().front().op() == ExprOp::Const) {
      const auto& a = e.args();
      if (a.size() == 2) return {a[0].value(), a[1]};
      return {a[0].value(), raw(ExprOp::Mul, std::vector<Expr>(a.begin() + 1, a.end()))};
    }
    return {Scalar(1.0), e};
  }

  static Expr scaled(Scalar k, const Expr& rest) {
    if (k == Scalar(1.0)) return rest;
    std::vector<Expr> f{constant(k)};
    if (rest.op() == ExprOp::Mul) {
      f.insert(f.end(), rest.args().begin(), rest.args().end());
    } else {
      f.push_back(rest);
    }
    return raw(ExprOp::Mul, std::move(f));
  }

  static void flatten(ExprOp op, const Expr& e, std::vector<Expr>& out) {
    if (e.op() == op) {
      for (const auto& a : e.args()) flatten(op, a, out);
    } else {
      out.push_back(e);
    }
  }

  static Expr add(const std::vector<Expr>& input) {
    std::vector<Expr> flat;
    for (const auto& e : input) flatten(ExprOp::Add, e, flat);
    Scalar c(0.0);
    std::vector<std::pair<Scalar, Expr>> parts;
    for (const auto& e : flat) {
      if (e.op() == ExprOp::Const) {
        c += e.value();
        continue;
      }
      auto [k, rest] = split_coefficient(e);
      auto it = std::find_if(parts.begin(), parts.end(),
                             [&](const auto& p) { return structurally_equal(p.second, rest); });
      if (it != parts.end()) {
        it->first += k;
      } else {
        parts.emplace_back(k, rest);
      }
    }
    std::vector<Expr> terms;
    for (const auto& [k, rest] : parts) {
      if (k == Scalar(0.0)) continue;
      terms.push_back(scaled(k, rest));
    }
    if (c != Scalar(0.0)) terms.push_back(constant(c));
    if (terms.empty()) return constant(0.0);
    if (terms.size() == 1) return terms.front();
    return raw(ExprOp::Add, std::move(terms));
  }

  static Expr mul(const std::vector<Expr>& input) {
    std::vector<Expr> flat;
    for (const auto& e : input) flatten(ExprOp::Mul, e, flat);
    Scalar c(1.0);
    std::vector<std::pair<Expr, std::int64_t>> parts;
    for (const auto& e : flat) {
      if (e.op() == ExprOp::Const) {
        c *= e.value();
        continue;
      }
      Expr base = e;
      std::int64_t n = 1;
      if (e.op() == ExprOp::Pow) {
        base = e.args().front();
        n = e.exponent();
      }
      auto it = std::find_if(parts.begin(), parts.end(),
                             [&](const auto& p) { return structurally_equal(p.first, base); });
      if (it != parts.end()) {
        it->second += n;
        check_exponent(it->second);
      } else {
        parts.emplace_back(base, n);
      }
    }
    if (c == Scalar(0.0)) return constant(0.0);
    std::vector<Expr> factors;
    for (const auto& [base, n] : parts) {
      if (n == 0) continue;
      factors.push_back(n == 1 ? base : raw(ExprOp::Pow, {base}, n));
    }
    if (factors.empty()) return constant(c);
    if (c != Scalar(1.0)) factors.insert(factors.begin(), constant(c));
    if (factors.size() == 1) return factors.front();
    return raw(ExprOp::Mul, std::move(factors));
  }

  static Expr power(const Expr& base, std::int64_t n) {
    check_exponent(n);
    if (n == 0) return constant(1.0);
    if (n == 1) return base;
    switch (base.op()) {
      case ExprOp::Const:
        return constant(int_power(base.value(), n));
      case ExprOp::Pow: {
        std::int64_t m = base.exponent() * n;
        return power(base.args().front(), m);
      }
      case ExprOp::Mul: {
        std::vector<Expr> f;
        for (const auto& a : base.args()) f.push_back(power(a, n));
        return mul(f);
      }
      case ExprOp::Var:
        return raw(ExprOp::Pow, {base}, n);
      default:
        if (n < 0) {
          throw Error(ErrorKind::InvalidArgument,
                      "negative exponent requires a variable or constant base");
        }
        return raw(ExprOp::Pow, {base}, n);
    }
  }

  static Expr function(ExprOp op, const Expr& arg) {
    if (arg.op() == ExprOp::Const) return constant(apply_function(op, arg.value()));
    return raw(op, {arg});
  }
};

// ---------------------------------------------------------------------------

Variable Variable::theta(int k) {
  if (k < 1 || k > kMaxIndex) {
    throw Error(ErrorKind::IndexOutOfRange, "theta index " + std::to_string(k) + " out of range");
  }
  return Variable(k);
}

std::string Variable::name() const {
  return index_ == 0 ? std::string("t") : "theta_" + std::to_string(index_);
}

Expr::Expr() : Expr(Scalar(0.0)) {}
Expr::Expr(Scalar value) : node_(ExprBuilder::constant(value).node_) {}
Expr::Expr(Variable v) : node_(ExprBuilder::variable(v.index()).node_) {}

ExprOp Expr::op() const { return node_->op; }
Scalar Expr::value() const { return node_->value; }
Variable Expr::variable() const {
  return node_->var == 0 ? Variable::time() : Variable::theta(node_->var);
}
std::int64_t Expr::exponent() const { return node_->exponent; }
const std::vector<Expr>& Expr::args() const { return node_->args; }
bool Expr::is_constant() const { return node_->mask == 0; }
bool Expr::is_zero() const { return op() == ExprOp::Const && value() == Scalar(0.0); }
bool Expr::is_one() const { return op() == ExprOp::Const && value() == Scalar(1.0); }
std::uint64_t Expr::variable_mask() const { return node_->mask; }
bool Expr::depends_on(Variable v) const { return (node_->mask >> v.index()) & 1U; }
std::size_t Expr::hash() const { return node_->hash; }

int Expr::max_theta_index() const {
  std::uint64_t m = node_->mask >> 1U;
  int k = 0;
  while (m) {
    ++k;
    m >>= 1U;
  }
  return k;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.hash != y.hash || x.op != y.op || x.args.size() != y.args.size()) return false;
  switch (x.op) {
    case ExprOp::Const:
      if (x.value != y.value) return false;
      break;
    case ExprOp::Var:
      if (x.var != y.var) return false;
      break;
    case ExprOp::Pow:
      if (x.exponent != y.exponent) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < x.args.size(); ++i) {
    if (!structurally_equal(x.args[i], y.args[i])) return false;
  }
  return true;
}

Expr operator+(const Expr& a, const Expr& b) { return ExprBuilder::add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return ExprBuilder::add({a, -b}); }
Expr operator*(const Expr& a, const Expr& b) { return ExprBuilder::mul({a, b}); }
Expr operator-(const Expr& a) { return ExprBuilder::mul({Expr(-1.0), a}); }
Expr pow(const Expr& base, std::int64_t exponent) { return ExprBuilder::power(base, exponent); }
Expr sin(const Expr& arg) { return ExprBuilder::function(ExprOp::Sin, arg); }
Expr cos(const Expr& arg) { return ExprBuilder::function(ExprOp::Cos, arg); }
Expr exp(const Expr& arg) { return ExprBuilder::function(ExprOp::Exp, arg); }
Expr sum(const std::vector<Expr>& terms) { return ExprBuilder::add(terms); }
Expr product(const std::vector<Expr>& factors) { return ExprBuilder::mul(factors); }

// ---------------------------------------------------------------------------
// Differentiation

namespace {

Expr derivative(const Expr& e, Variable v) {
  if (!e.depends_on(v)) return Expr(0.0);
  const auto& a = e.args();
  switch (e.op()) {
    case ExprOp::Const:
      return Expr(0.0);
    case ExprOp::Var:
      return Expr(1.0);
    case ExprOp::Add: {
      std::vector<Expr> terms;
      terms.reserve(a.size());
      for (const auto& x : a) terms.push_back(derivative(x, v));
      return sum(terms);
    }
    case ExprOp::Mul: {
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].depends_on(v)) continue;
        std::vector<Expr> f = a;
        f[i] = derivative(a[i], v);
        terms.push_back(product(f));
      }
      return sum(terms);
    }
    case ExprOp::Pow: {
      std::int64_t n = e.exponent();
      return product({Expr(static_cast<double>(n)), pow(a[0], n - 1), derivative(a[0], v)});
    }
    case ExprOp::Sin:
      return cos(a[0]) * derivative(a[0], v);
    case ExprOp::Cos:
      return -(sin(a[0]) * derivative(a[0], v));
    case ExprOp::Exp:
      return e * derivative(a[0], v);
  }
  return Expr(0.0);
}

}  // namespace

Expr differentiate(const Expr& e, Variable var, int k) {
  if (k < 0) throw Error(ErrorKind::InvalidArgument, "negative derivative order");
  Expr r = e;
  for (int i = 0; i < k && !r.is_zero(); ++i) r = derivative(r, var);
  return r;
}

// ---------------------------------------------------------------------------
// Evaluation

Scalar evaluate(const Expr& e, const Point& p) {
  const auto& a = e.args();
  switch (e.op()) {
    case ExprOp::Const:
      return e.value();
    case ExprOp::Var: {
      int k = e.variable().index();
      if (k == 0) return Scalar(p.t, 0.0);
      if (static_cast<std::size_t>(k) > p.theta.size()) {
        throw Error(ErrorKind::UnboundVariable, "theta_" + std::to_string(k) + " is not bound");
      }
      return Scalar(p.theta[k - 1], 0.0);
    }
    case ExprOp::Add: {
      Scalar s(0.0);
      for (const auto& x : a) s += evaluate(x, p);
      return s;
    }
    case ExprOp::Mul: {
      Scalar s(1.0);
      for (const auto& x : a) s *= evaluate(x, p);
      return s;
    }
    case ExprOp::Pow:
      return int_power(evaluate(a[0], p), e.exponent());
    case ExprOp::Sin:
    case ExprOp::Cos:
    case ExprOp::Exp:
      return apply_function(e.op(), evaluate(a[0], p));
  }
  return Scalar(0.0);
}

namespace {

// Index of a variable name, or -1.
int variable_index(std::string_view name) {
  if (name == "t") return 0;
  constexpr std::string_view prefix = "theta_";
  if (name.size() <= prefix.size() || name.substr(0, prefix.size()) != prefix) return -1;
  int k = 0;
  auto tail = name.substr(prefix.size());
  if (tail.front() == '0') return -1;
  auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), k);
  if (ec != std::errc() || ptr != tail.data() + tail.size()) return -1;
  return k;
}

}  // namespace

Scalar evaluate(const Expr& e, const std::map<std::string, double>& bindings) {
  Point p;
  std::vector<double> theta(static_cast<std::size_t>(e.max_theta_index()),
                            std::numeric_limits<double>::quiet_NaN());
  std::uint64_t bound = 0;
  for (const auto& [name, value] : bindings) {
    int k = variable_index(name);
    if (k < 0) throw Error(ErrorKind::UnknownIdentifier, "unknown variable '" + name + "'");
    bound |= std::uint64_t{1} << k;
    if (k == 0) {
      p.t = value;
    } else if (static_cast<std::size_t>(k) <= theta.size()) {
      theta[k - 1] = value;
    }
  }
  std::uint64_t missing = e.variable_mask() & ~bound;
  if (missing) {
    int k = 0;
    while (!((missing >> k) & 1U)) ++k;
    throw Error(ErrorKind::UnboundVariable,
                (k == 0 ? std::string("t") : "theta_" + std::to_string(k)) + " is not bound");
  }
  p.theta = theta;
  return evaluate(e, p);
}

Expr relabel_theta(const Expr& e, const std::function<int(int)>& map) {
  if ((e.variable_mask() >> 1U) == 0) return e;
  switch (e.op()) {
    case ExprOp::Var:
      return Expr(Variable::theta(map(e.variable().index())));
    case ExprOp::Add:
    case ExprOp::Mul: {
      std::vector<Expr> a;
      for (const auto& x : e.args()) a.push_back(relabel_theta(x, map));
      return e.op() == ExprOp::Add ? sum(a) : product(a);
    }
    case ExprOp::Pow:
      return pow(relabel_theta(e.args()[0], map), e.exponent());
    case ExprOp::Sin:
      return sin(relabel_theta(e.args()[0], map));
    case ExprOp::Cos:
      return cos(relabel_theta(e.args()[0], map));
    case ExprOp::Exp:
      return exp(relabel_theta(e.args()[0], map));
    default:
      return e;
  }
}

// ---------------------------------------------------------------------------
// Printing

namespace {

constexpr double kDisplayImagCutoff = 1e-12;

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Scalar display_value(Scalar v) {
  if (std::abs(v.imag()) < kDisplayImagCutoff) return Scalar(v.real(), 0.0);
  return v;
}

// True when the printed constant starts with a minus sign and is not parenthesized.
bool negative_leading(Scalar v) {
  v = display_value(v);
  if (v.imag() == 0.0) return v.real() < 0.0;
  return v.real() == 0.0 && v.imag() < 0.0;
}

std::string format_scalar(Scalar v) {
  v = display_value(v);
  if (v.imag() == 0.0) return format_real(v.real());
  if (v.real() == 0.0) return format_real(v.imag()) + "i";
  std::string s = "(" + format_real(v.real());
  s += v.imag() < 0.0 ? "-" : "+";
  s += format_real(std::abs(v.imag())) + "i)";
  return s;
}

enum Prec { kAny = 0, kSum = 1, kProduct = 2, kPower = 3, kAtom = 4 };

int precedence(const Expr& e) {
  switch (e.op()) {
    case ExprOp::Add: return kSum;
    case ExprOp::Mul: return kProduct;
    case ExprOp::Pow: return kPower;
    case ExprOp::Const: return negative_leading(e.value()) ? kProduct : kAtom;
    default: return kAtom;
  }
}

bool term_is_negative(const Expr& e) {
  if (e.op() == ExprOp::Const) return negative_leading(e.value());
  if (e.op() == ExprOp::Mul && e.args().front().op() == ExprOp::Const) {
    return negative_leading(e.args().front().value());
  }
  return false;
}

std::string print(const Expr& e, int ctx);

std::string print_body(const Expr& e) {
  const auto& a = e.args();
  switch (e.op()) {
    case ExprOp::Const:
      return format_scalar(e.value());
    case ExprOp::Var:
      return e.variable().name();
    case ExprOp::Add: {
      std::string s = print(a[0], kProduct);
      for (std::size_t i = 1; i < a.size(); ++i) {
        if (term_is_negative(a[i])) {
          s += " - " + print(-a[i], kProduct);
        } else {
          s += " + " + print(a[i], kProduct);
        }
      }
      return s;
    }
    case ExprOp::Mul: {
      std::string s;
      std::size_t first = 0;
      if (a[0].op() == ExprOp::Const) {
        Scalar c = display_value(a[0].value());
        s = c == Scalar(-1.0) ? std::string("-") : format_scalar(a[0].value()) + "*";
        first = 1;
      }
      for (std::size_t i = first; i < a.size(); ++i) {
        if (i > first) s += "*";
        s += print(a[i], kPower);
      }
      return s;
    }
    case ExprOp::Pow:
      return print(a[0], kAtom) + "^" + std::to_string(e.exponent());
    case ExprOp::Sin:
      return "sin(" + print(a[0], kAny) + ")";
    case ExprOp::Cos:
      return "cos(" + print(a[0], kAny) + ")";
    case ExprOp::Exp:
      return "exp(" + print(a[0], kAny) + ")";
  }
  return {};
}

std::string print(const Expr& e, int ctx) {
  std::string body = print_body(e);
  return precedence(e) < ctx ? "(" + body + ")" : body;
}

}  // namespace

std::string to_string(const Expr& e) { return print(e, kAny); }

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  Parser(std::string_view text, int dim) : text_(text), dim_(dim) {}

  Expr parse() {
    Expr e = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, ErrorKind kind = ErrorKind::Parse) const {
    throw ParseError(kind, pos_, msg);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
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
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }

  Expr expression() {
    std::vector<Expr> terms{term()};
    for (;;) {
      if (accept('+')) {
        terms.push_back(term());
      } else if (accept('-')) {
        terms.push_back(-term());
      } else {
        break;
      }
    }
    return sum(terms);
  }

  Expr term() {
    std::vector<Expr> factors{factor()};
    for (;;) {
      if (accept('*')) {
        factors.push_back(factor());
      } else if (accept('/')) {
        std::size_t at = pos_;
        Expr d = factor();
        try {
          factors.push_back(pow(d, -1));
        } catch (const Error& err) {
          throw ParseError(err.kind() == ErrorKind::Pole ? ErrorKind::Pole : ErrorKind::Parse, at,
                           "division requires a variable or constant divisor");
        }
      } else {
        break;
      }
    }
    return product(factors);
  }

  Expr factor() {
    if (accept('-')) return -factor();
    Expr base = atom();
    if (accept('^')) {
      skip_space();
      std::size_t at = pos_;
      std::int64_t n = integer();
      try {
        return pow(base, n);
      } catch (const Error& err) {
        throw ParseError(err.kind(), at, err.what());
      }
    }
    return base;
  }

  std::int64_t integer() {
    skip_space();
    bool negative = false;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
      negative = text_[pos_] == '-';
      ++pos_;
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer exponent");
    std::int64_t n = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, n);
    if (ec != std::errc() || n > kExponentLimit) {
      pos_ = start;
      fail("exponent exceeds 2^31", ErrorKind::ExponentOverflow);
    }
    return negative ? -n : n;
  }

  Expr number() {
    std::size_t start = pos_;
    auto digits = [&] {
      std::size_t s = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return pos_ - s;
    };
    std::size_t n = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) fail("malformed number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc()) {
      pos_ = start;
      fail("malformed number");
    }
    if (pos_ < text_.size() && text_[pos_] == 'i' &&
        !(pos_ + 1 < text_.size() && ident_char(text_[pos_ + 1]))) {
      ++pos_;
      return Expr(Scalar(0.0, v));
    }
    return Expr(v);
  }

  Expr atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expression();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (!ident_char(c)) fail(std::string("unexpected character '") + c + "'");
    std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    std::string_view name = text_.substr(start, pos_ - start);
    if (name == "sin" || name == "cos" || name == "exp") {
      expect('(');
      Expr arg = expression();
      expect(')');
      if (name == "sin") return sin(arg);
      if (name == "cos") return cos(arg);
      return exp(arg);
    }
    int k = variable_index(name);
    if (k < 0) {
      pos_ = start;
      fail("unknown identifier '" + std::string(name) + "'", ErrorKind::UnknownIdentifier);
    }
    if (k > dim_ || k > Variable::kMaxIndex) {
      pos_ = start;
      fail("theta index " + std::to_string(k) + " out of range for dimension " +
               std::to_string(dim_),
           ErrorKind::IndexOutOfRange);
    }
    return k == 0 ? Expr::t() : Expr::theta(k);
  }

  std::string_view text_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text, int dim) {
  if (dim < 0) throw Error(ErrorKind::InvalidArgument, "negative dimension");
  return Parser(text, dim).parse();
}

}  // namespace cf
