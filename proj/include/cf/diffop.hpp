#pragma once

#include <compare>
#include <initializer_list>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cf/expr.hpp"

namespace cf {

// Multi-index alpha = (alpha_1, ..., alpha_d); compared lexicographically.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(int dim) : a_(static_cast<std::size_t>(dim), 0) {}
  MultiIndex(std::initializer_list<int> a);
  explicit MultiIndex(std::vector<int> a);

  // e_k scaled by order: derivative order `order` in theta_k (1-based k).
  static MultiIndex unit(int dim, int k, int order = 1);

  int dim() const { return static_cast<int>(a_.size()); }
  int order() const;  // |alpha|
  bool is_zero() const { return order() == 0; }
  int operator[](std::size_t i) const { return a_[i]; }
  int& operator[](std::size_t i) { return a_[i]; }
  const std::vector<int>& values() const { return a_; }

  MultiIndex operator+(const MultiIndex& o) const;
  MultiIndex operator-(const MultiIndex& o) const;
  bool dominates(const MultiIndex& o) const;  // componentwise >=

  std::string str() const;  // "[a1,...,ad]"

  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> a_;
};

// Element of D_d = R[D_1, ..., D_d]: a finite sum of terms a_alpha(theta) D_alpha,
// kept normal ordered (coefficient left of the derivatives).
class DiffOp {
 public:
  static constexpr int kMaxOrder = 64;

  DiffOp() = default;
  explicit DiffOp(int dim) : dim_(dim) {}

  static DiffOp zero(int dim) { return DiffOp(dim); }
  static DiffOp identity(int dim);
  // Multiplication by a function of theta (an order-0 operator).
  static DiffOp multiplication(int dim, const Expr& a);
  // a * D_alpha.
  static DiffOp term(const Expr& a, const MultiIndex& alpha);
  // D_k = d/dtheta_k.
  static DiffOp derivative(int dim, int k, int order = 1);

  int dim() const { return dim_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  auto begin() const { return terms_.begin(); }
  auto end() const { return terms_.end(); }
  const std::map<MultiIndex, Expr>& terms() const { return terms_; }

  // Coefficient of D_alpha (zero when absent).
  Expr coeff(const MultiIndex& alpha) const;
  // Largest |alpha| among stored terms; -1 for the zero operator.
  int order() const;
  // theta indices that some coefficient depends on or that are differentiated.
  std::vector<int> support() const;
  // True when every coefficient is a constant.
  bool has_constant_coefficients() const;

  // Adds a * D_alpha, then drops the term if it became zero.
  void add_term(const MultiIndex& alpha, const Expr& a);

  // Same operator embedded in a larger parameter space (extra zero indices).
  DiffOp embedded(int dim) const;
  // theta_k -> theta_{map(k)} in coefficients and derivatives.
  DiffOp relabeled(int new_dim, const std::function<int(int)>& map) const;

  // "coef * D[a1,...,ad] + ..."; the zero operator prints as "0".
  std::string str() const;

 private:
  void prune(const MultiIndex& alpha);

  int dim_ = 1;
  std::map<MultiIndex, Expr> terms_;
};

DiffOp parse_diffop(std::string_view text, int dim);

// Sum_alpha a_alpha * D_alpha f.
Expr apply(const DiffOp& op, const Expr& f);

DiffOp operator+(const DiffOp& a, const DiffOp& b);
DiffOp operator-(const DiffOp& a, const DiffOp& b);
DiffOp operator-(const DiffOp& a);
// Composition a o b, normal ordered through the Leibniz rule.
DiffOp operator*(const DiffOp& a, const DiffOp& b);
// Left multiplication by a function: (e .) o a.
DiffOp scale(const Expr& e, const DiffOp& a);
DiffOp pow(const DiffOp& a, int k);

// Operator equality: the normal-ordered coefficients of a - b vanish at random
// points (relative tolerance against the coefficient magnitudes).
bool equivalent(const DiffOp& a, const DiffOp& b, double tol = 1e-9);

// True when the expression is numerically zero: |value| <= threshold * max(1, m)
// at 20 random points, confirmed at 20 fresh points, where m is the value with
// every sum taken over absolute values.
bool numerically_zero(const Expr& e, double threshold = 1e-12);

}  // namespace cf
