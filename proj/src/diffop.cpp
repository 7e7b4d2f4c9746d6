#include "cf/diffop.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>

#include "cf/error.hpp"

namespace cf {

namespace {

void check_dims(int a, int b) {
  if (a != b) {
    throw Error(ErrorKind::DimensionMismatch,
                "operator dimensions " + std::to_string(a) + " and " + std::to_string(b));
  }
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Deterministic sample points for evaluation-based zero tests.
std::vector<std::vector<double>> sample_points(int dim, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-2.5, 2.5);
  std::vector<std::vector<double>> pts(static_cast<std::size_t>(count),
                                       std::vector<double>(static_cast<std::size_t>(dim) + 1));
  for (auto& p : pts) {
    for (auto& x : p) x = dist(rng);
  }
  return pts;
}

// e evaluated with every sum replaced by the sum of absolute values; the
// scale against which rounding residue is measured.
double magnitude(const Expr& e, const std::vector<double>& p, const Point& at) {
  switch (e.op()) {
    case ExprOp::Const:
      return std::abs(e.value());
    case ExprOp::Var:
      return std::abs(p[static_cast<std::size_t>(e.variable().index())]);
    case ExprOp::Add: {
      double s = 0.0;
      for (const auto& a : e.args()) s += magnitude(a, p, at);
      return s;
    }
    case ExprOp::Mul: {
      double s = 1.0;
      for (const auto& a : e.args()) s *= magnitude(a, p, at);
      return s;
    }
    case ExprOp::Pow:
      if (e.exponent() > 0) {
        return std::pow(magnitude(e.args()[0], p, at), static_cast<double>(e.exponent()));
      }
      return std::abs(evaluate(e, at));
    default:
      return std::abs(evaluate(e, at));
  }
}

bool vanishes_at(const Expr& e, const std::vector<std::vector<double>>& pts, double threshold) {
  for (const auto& p : pts) {
    Point at{p[0], std::span<const double>(p).subspan(1)};
    Scalar v;
    double scale = 1.0;
    try {
      v = evaluate(e, at);
      scale = std::max(1.0, magnitude(e, p, at));
    } catch (const Error&) {
      return false;
    }
    if (!(std::abs(v) <= threshold * scale)) return false;
  }
  return true;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

// ---------------------------------------------------------------------------
// MultiIndex

MultiIndex::MultiIndex(std::initializer_list<int> a) : a_(a) {
  for (int v : a_) {
    if (v < 0) throw Error(ErrorKind::InvalidArgument, "negative multi-index entry");
  }
}

MultiIndex::MultiIndex(std::vector<int> a) : a_(std::move(a)) {
  for (int v : a_) {
    if (v < 0) throw Error(ErrorKind::InvalidArgument, "negative multi-index entry");
  }
}

MultiIndex MultiIndex::unit(int dim, int k, int order) {
  if (k < 1 || k > dim) throw Error(ErrorKind::IndexOutOfRange, "theta index out of range");
  MultiIndex m(dim);
  m.a_[static_cast<std::size_t>(k - 1)] = order;
  return m;
}

int MultiIndex::order() const { return std::accumulate(a_.begin(), a_.end(), 0); }

MultiIndex MultiIndex::operator+(const MultiIndex& o) const {
  check_dims(dim(), o.dim());
  MultiIndex r = *this;
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
  return r;
}

MultiIndex MultiIndex::operator-(const MultiIndex& o) const {
  check_dims(dim(), o.dim());
  MultiIndex r = *this;
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] -= o.a_[i];
  return r;
}

bool MultiIndex::dominates(const MultiIndex& o) const {
  for (std::size_t i = 0; i < a_.size(); ++i) {
    if (a_[i] < o.a_[i]) return false;
  }
  return true;
}

std::string MultiIndex::str() const {
  std::string s = "[";
  for (std::size_t i = 0; i < a_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(a_[i]);
  }
  return s + "]";
}

// ---------------------------------------------------------------------------
// DiffOp

bool numerically_zero(const Expr& e, double threshold) {
  if (e.is_constant()) return std::abs(e.value()) <= threshold;
  int dim = e.max_theta_index();
  return vanishes_at(e, sample_points(dim, 20, 0x5eed0001), threshold) &&
         vanishes_at(e, sample_points(dim, 20, 0x5eed0002), threshold);
}

DiffOp DiffOp::identity(int dim) { return multiplication(dim, Expr(1.0)); }

DiffOp DiffOp::multiplication(int dim, const Expr& a) {
  DiffOp r(dim);
  r.add_term(MultiIndex(dim), a);
  return r;
}

DiffOp DiffOp::term(const Expr& a, const MultiIndex& alpha) {
  DiffOp r(alpha.dim());
  r.add_term(alpha, a);
  return r;
}

DiffOp DiffOp::derivative(int dim, int k, int order) {
  return term(Expr(1.0), MultiIndex::unit(dim, k, order));
}

Expr DiffOp::coeff(const MultiIndex& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? Expr(0.0) : it->second;
}

int DiffOp::order() const {
  int m = -1;
  for (const auto& [alpha, a] : terms_) m = std::max(m, alpha.order());
  return m;
}

std::vector<int> DiffOp::support() const {
  std::uint64_t mask = 0;
  for (const auto& [alpha, a] : terms_) {
    mask |= a.variable_mask() >> 1U;
    for (int k = 0; k < alpha.dim(); ++k) {
      if (alpha[static_cast<std::size_t>(k)] > 0) mask |= std::uint64_t{1} << k;
    }
  }
  std::vector<int> s;
  for (int k = 0; k < 63; ++k) {
    if ((mask >> k) & 1U) s.push_back(k + 1);
  }
  return s;
}

bool DiffOp::has_constant_coefficients() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const auto& t) { return t.second.is_constant(); });
}

void DiffOp::add_term(const MultiIndex& alpha, const Expr& a) {
  check_dims(dim_, alpha.dim());
  if (alpha.order() > kMaxOrder) {
    throw Error(ErrorKind::DegreeCap, "operator order " + std::to_string(alpha.order()) +
                                          " exceeds " + std::to_string(kMaxOrder));
  }
  if (a.depends_on(Variable::time())) {
    throw Error(ErrorKind::InvalidArgument, "operator coefficients must not depend on t");
  }
  if (a.max_theta_index() > dim_) {
    throw Error(ErrorKind::DimensionMismatch, "coefficient references theta_" +
                                                  std::to_string(a.max_theta_index()) +
                                                  " in dimension " + std::to_string(dim_));
  }
  auto [it, inserted] = terms_.try_emplace(alpha, a);
  if (!inserted) it->second = it->second + a;
  prune(alpha);
}

void DiffOp::prune(const MultiIndex& alpha) {
  auto it = terms_.find(alpha);
  if (it != terms_.end() && numerically_zero(it->second)) terms_.erase(it);
}

DiffOp DiffOp::embedded(int dim) const {
  if (dim < dim_) throw Error(ErrorKind::DimensionMismatch, "cannot embed into a smaller space");
  if (dim == dim_) return *this;
  return relabeled(dim, [](int k) { return k; });
}

DiffOp DiffOp::relabeled(int new_dim, const std::function<int(int)>& map) const {
  DiffOp r(new_dim);
  for (const auto& [alpha, a] : terms_) {
    MultiIndex beta(new_dim);
    for (int k = 1; k <= dim_; ++k) {
      int v = alpha[static_cast<std::size_t>(k - 1)];
      if (v == 0) continue;
      int j = map(k);
      if (j < 1 || j > new_dim) throw Error(ErrorKind::IndexOutOfRange, "relabel target");
      beta[static_cast<std::size_t>(j - 1)] += v;
    }
    r.add_term(beta, relabel_theta(a, map));
  }
  return r;
}

std::string DiffOp::str() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& [alpha, a] : terms_) {
    if (!s.empty()) s += " + ";
    std::string c = to_string(a);
    if (a.op() == ExprOp::Add) c = "(" + c + ")";
    s += c + " * D" + alpha.str();
  }
  return s;
}

DiffOp parse_diffop(std::string_view text, int dim) {
  std::string body = trim(text);
  DiffOp r(dim);
  if (body == "0") return r;
  // Split at " + " outside parentheses and brackets.
  std::vector<std::string> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (depth == 0 && c == '+' && i > 0 && body[i - 1] == ' ' && i + 1 < body.size() &&
        body[i + 1] == ' ') {
      parts.push_back(body.substr(start, i - start));
      start = i + 1;
    }
  }
  parts.push_back(body.substr(start));
  for (const auto& raw : parts) {
    std::string term = trim(raw);
    MultiIndex alpha(dim);
    std::string coef = term;
    auto at = term.rfind("D[");
    if (at != std::string::npos && term.back() == ']') {
      std::string idx = term.substr(at + 2, term.size() - at - 3);
      std::vector<int> values;
      std::size_t p = 0;
      while (p <= idx.size()) {
        auto q = idx.find(',', p);
        if (q == std::string::npos) q = idx.size();
        std::string tok = trim(std::string_view(idx).substr(p, q - p));
        int v = -1;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size() || v < 0) {
          throw Error(ErrorKind::Parse, "bad multi-index in '" + term + "'");
        }
        values.push_back(v);
        p = q + 1;
      }
      if (static_cast<int>(values.size()) != dim) {
        throw Error(ErrorKind::DimensionMismatch, "multi-index length in '" + term + "'");
      }
      alpha = MultiIndex(values);
      coef = trim(std::string_view(term).substr(0, at));
      if (coef.empty()) {
        coef = "1";
      } else if (coef.back() == '*') {
        coef = trim(std::string_view(coef).substr(0, coef.size() - 1));
      } else {
        throw Error(ErrorKind::Parse, "expected '*' before D[...] in '" + term + "'");
      }
    }
    r.add_term(alpha, parse_expr(coef, dim));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Ring operations

Expr apply(const DiffOp& op, const Expr& f) {
  if (f.max_theta_index() > op.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "function depends on theta_" +
                                                  std::to_string(f.max_theta_index()) +
                                                  " beyond operator dimension " +
                                                  std::to_string(op.dim()));
  }
  std::vector<Expr> terms;
  for (const auto& [alpha, a] : op) {
    Expr g = f;
    for (int k = 1; k <= op.dim() && !g.is_zero(); ++k) {
      g = differentiate(g, Variable::theta(k), alpha[static_cast<std::size_t>(k - 1)]);
    }
    terms.push_back(a * g);
  }
  return sum(terms);
}

DiffOp operator+(const DiffOp& a, const DiffOp& b) {
  check_dims(a.dim(), b.dim());
  DiffOp r = a;
  for (const auto& [alpha, c] : b) r.add_term(alpha, c);
  return r;
}

DiffOp operator-(const DiffOp& a) { return scale(Expr(-1.0), a); }

DiffOp operator-(const DiffOp& a, const DiffOp& b) { return a + (-b); }

DiffOp scale(const Expr& e, const DiffOp& a) {
  DiffOp r(a.dim());
  if (e.is_zero()) return r;
  for (const auto& [alpha, c] : a) r.add_term(alpha, e * c);
  return r;
}

DiffOp operator*(const DiffOp& a, const DiffOp& b) {
  check_dims(a.dim(), b.dim());
  const int dim = a.dim();
  std::map<MultiIndex, std::vector<Expr>> acc;
  for (const auto& [beta, bc] : b) {
    // Derivatives of b's coefficient, filled on demand.
    std::map<MultiIndex, Expr> dcache;
    auto deriv = [&](const MultiIndex& gamma) -> Expr {
      auto it = dcache.find(gamma);
      if (it != dcache.end()) return it->second;
      Expr g = bc;
      for (int k = 1; k <= dim && !g.is_zero(); ++k) {
        g = differentiate(g, Variable::theta(k), gamma[static_cast<std::size_t>(k - 1)]);
      }
      dcache.emplace(gamma, g);
      return g;
    };
    for (const auto& [alpha, ac] : a) {
      // D_alpha (b .) = sum_{gamma <= alpha} C(alpha, gamma) (D_gamma b) D_{alpha - gamma}.
      MultiIndex gamma(dim);
      for (;;) {
        Expr db = deriv(gamma);
        if (!db.is_zero()) {
          double w = 1.0;
          for (std::size_t i = 0; i < static_cast<std::size_t>(dim); ++i) {
            w *= binomial(alpha[i], gamma[i]);
          }
          MultiIndex target = alpha - gamma + beta;
          if (target.order() > DiffOp::kMaxOrder) {
            throw Error(ErrorKind::DegreeCap, "product order " + std::to_string(target.order()) +
                                                  " exceeds " +
                                                  std::to_string(DiffOp::kMaxOrder));
          }
          acc[target].push_back(product({Expr(w), ac, db}));
        }
        // Next gamma <= alpha in odometer order.
        std::size_t i = 0;
        while (i < static_cast<std::size_t>(dim) && gamma[i] == alpha[i]) {
          gamma[i] = 0;
          ++i;
        }
        if (i == static_cast<std::size_t>(dim)) break;
        ++gamma[i];
      }
    }
  }
  DiffOp r(dim);
  for (const auto& [alpha, terms] : acc) r.add_term(alpha, sum(terms));
  return r;
}

DiffOp pow(const DiffOp& a, int k) {
  if (k < 0) throw Error(ErrorKind::InvalidArgument, "negative operator power");
  DiffOp r = DiffOp::identity(a.dim());
  for (int i = 0; i < k; ++i) r = a * r;
  return r;
}

bool equivalent(const DiffOp& a, const DiffOp& b, double tol) {
  if (a.dim() != b.dim()) return false;
  std::vector<MultiIndex> keys;
  for (const auto& [alpha, c] : a) keys.push_back(alpha);
  for (const auto& [alpha, c] : b) {
    if (!a.terms().count(alpha)) keys.push_back(alpha);
  }
  const auto pts = sample_points(a.dim(), 10, 0x5eed0003);
  for (const auto& alpha : keys) {
    Expr ca = a.coeff(alpha);
    Expr cb = b.coeff(alpha);
    for (const auto& p : pts) {
      Point at{0.0, std::span<const double>(p).subspan(1)};
      Scalar va = evaluate(ca, at);
      Scalar vb = evaluate(cb, at);
      double scale_ref = std::max({1.0, std::abs(va), std::abs(vb)});
      if (!(std::abs(va - vb) <= tol * scale_ref)) return false;
    }
  }
  return true;
}

}  // namespace cf
