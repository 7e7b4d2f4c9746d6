#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cf {

using Scalar = std::complex<double>;

// A variable of the expression language: index 0 is time t, index k >= 1 is theta_k.
class Variable {
 public:
  static constexpr int kMaxIndex = 63;

  static Variable time() { return Variable(0); }
  static Variable theta(int k);

  int index() const { return index_; }
  bool is_time() const { return index_ == 0; }
  std::string name() const;

  friend auto operator<=>(const Variable&, const Variable&) = default;

 private:
  explicit Variable(int index) : index_(index) {}
  int index_;
};

// Point of evaluation: t plus theta_1..theta_d (theta[k-1] holds theta_k).
struct Point {
  double t = 0.0;
  std::span<const double> theta;
};

enum class ExprOp { Const, Var, Add, Mul, Pow, Sin, Cos, Exp };

class Expr;

namespace detail {
struct ExprNode;
}

// Immutable symbolic scalar expression over t and theta_k.
//
// Nodes are built through simplifying constructors: constants are folded,
// sums and products are flattened, 0/1 identities removed, like terms of a
// sum merged and equal bases of a product collected into one power.
// Negation is stored as multiplication by -1. No canonical form is attempted.
class Expr {
 public:
  Expr();  // zero
  Expr(Scalar value);
  Expr(double value) : Expr(Scalar(value)) {}
  Expr(int value) : Expr(Scalar(static_cast<double>(value))) {}
  Expr(Variable v);

  static Expr constant(Scalar value) { return Expr(value); }
  static Expr var(Variable v) { return Expr(v); }
  static Expr t() { return Expr(Variable::time()); }
  static Expr theta(int k) { return Expr(Variable::theta(k)); }

  ExprOp op() const;
  // Valid for Const nodes.
  Scalar value() const;
  // Valid for Var nodes.
  Variable variable() const;
  // Valid for Pow nodes.
  std::int64_t exponent() const;
  // Children: summands, factors, the base of a power, or a function argument.
  const std::vector<Expr>& args() const;

  bool is_constant() const;  // no variables at all
  bool is_zero() const;      // the constant 0
  bool is_one() const;       // the constant 1

  // Bit k set when variable index k occurs.
  std::uint64_t variable_mask() const;
  bool depends_on(Variable v) const;
  // Largest theta index that occurs, 0 when none.
  int max_theta_index() const;

  std::size_t hash() const;
  friend bool structurally_equal(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const detail::ExprNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::ExprNode> node_;

  friend struct ExprBuilder;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, std::int64_t exponent);
Expr sin(const Expr& arg);
Expr cos(const Expr& arg);
Expr exp(const Expr& arg);
Expr sum(const std::vector<Expr>& terms);
Expr product(const std::vector<Expr>& factors);

// Parses text in the expression grammar; identifiers are t and theta_1..theta_dim.
Expr parse_expr(std::string_view text, int dim);

// Printed form is accepted by parse_expr and re-prints identically.
// Imaginary parts below 1e-12 are suppressed.
std::string to_string(const Expr& e);

// k-th partial derivative with respect to var.
Expr differentiate(const Expr& e, Variable var, int k = 1);

Scalar evaluate(const Expr& e, const Point& p);
Scalar evaluate(const Expr& e, const std::map<std::string, double>& bindings);

// Replaces theta_k by theta_{map(k)}.
Expr relabel_theta(const Expr& e, const std::function<int(int)>& map);

}  // namespace cf
