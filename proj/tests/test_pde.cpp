#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cf/error.hpp"
#include "cf/iterint.hpp"
#include "cf/pde.hpp"
#include "cf/verify.hpp"

using namespace cf;

namespace {

const Letter x0 = Letter::drift();
const Letter x1 = Letter::input(1);
const Expr th = Expr::theta(1);

DiffOp D(int order = 1) { return DiffOp::derivative(1, 1, order); }
Word dx(int k) { return Word::drift_power(k) * Word{x1}; }

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Numeric;
}

bool same(const DiffOp& a, const DiffOp& b) {
  return same_action(a, b, {th, th * th, sin(th)}, 10, 1e-9);
}

// Every coefficient differentiated in theta_1.
DiffOp coefficient_derivative(const DiffOp& a) {
  DiffOp r(a.dim());
  for (const auto& [alpha, c] : a) r.add_term(alpha, differentiate(c, Variable::theta(1)));
  return r;
}

}  // namespace

TEST_CASE("transport coefficients") {
  TransportSpec s;
  s.V = Expr(1.5);
  s.y0 = sin(th);
  s.N = 4;
  GenSeries c = transport_series(s);
  CHECK(equivalent(c.coeff(Word{}), DiffOp::multiplication(1, sin(th))));
  CHECK(equivalent(c.coeff(Word{x1}), DiffOp::identity(1)));
  CHECK(equivalent(c.coeff(dx(2)), DiffOp::term(Expr(2.25), MultiIndex{2})));
  CHECK(c.is_linear());
}

TEST_CASE("transport recurrence, both readings") {
  for (const Expr& V : {Expr(0.8), Expr(1.0) + Expr(0.5) * th * th}) {
    TransportSpec s;
    s.V = V;
    s.N = 5;
    GenSeries c = transport_series(s);
    for (int k = 0; k < 5; ++k) {
      const DiffOp A = c.coeff(dx(k));
      const DiffOp closed = scale(-V, D()) * A;
      const DiffOp expanded = scale(-V, coefficient_derivative(A)) + scale(-V, A * D());
      CHECK(same(c.coeff(dx(k + 1)), closed));
      CHECK(same(expanded, closed));
    }
  }
}

TEST_CASE("first-order inverse") {
  GenSeries zero = first_order_inverse(Expr(2.0), 0);
  CHECK(zero.size() == 1);
  CHECK(equivalent(zero.coeff(Word{}), DiffOp::identity(1)));
  GenSeries c = first_order_inverse(Expr(0.7), 3);
  CHECK(equivalent(c.coeff(Word{x1}), DiffOp::term(Expr(-0.7), MultiIndex{1})));
  for (const Expr& beta : {Expr(1.5), Expr(1.0) + Expr(0.5) * th * th, sin(th)}) {
    const int N = 6;
    GenSeries id = compose_unital(first_order_inverse(beta, N), first_order_operator(beta));
    CHECK(equivalent(id.coeff(Word{}), DiffOp::identity(1)));
    for (const auto& [w, a] : id) {
      if (!w.empty()) CHECK(static_cast<int>(w.size()) > N);
    }
  }
}

TEST_CASE("characteristic roots") {
  auto [b1, b2] = characteristic_roots(3.0, 2.0);
  CHECK(std::abs(b1 - 2.0) < 1e-14);
  CHECK(std::abs(b2 - 1.0) < 1e-14);
  auto [c1, c2] = characteristic_roots(1.0, 1.0);
  CHECK(c1.imag() > 0);
  CHECK(std::abs(c1 + c2 - 1.0) < 1e-14);
  CHECK(std::abs(c1 * c2 - 1.0) < 1e-14);
}

TEST_CASE("second order degenerate case") {
  SecondOrderSpec s;
  s.y0 = cos(th);
  s.y1 = th;
  s.N = 5;
  GenSeries c = second_order_series(s);
  CHECK(c.size() == 3);
  CHECK(equivalent(c.coeff(Word{}), DiffOp::multiplication(1, cos(th))));
  CHECK(equivalent(c.coeff(Word{x0}), DiffOp::multiplication(1, th)));
  CHECK(equivalent(c.coeff(Word{x0, x1}), DiffOp::identity(1)));
}

TEST_CASE("wave coefficients") {
  GenSeries w = wave_series(10);
  CHECK(equivalent(w.coeff(dx(1)), DiffOp::identity(1)));
  CHECK(w.coeff(dx(2)).is_zero());
  CHECK(equivalent(w.coeff(dx(3)), D(2)));
  // (1/2) sum (-D)^k + (1/2) sum D^k on x0^{k+1} x1.
  for (int k = 0; k + 2 <= 10; ++k) {
    DiffOp display = scale(Expr(0.5), pow(scale(Expr(-1.0), D()), k)) + scale(Expr(0.5), pow(D(), k));
    CHECK(same(w.coeff(dx(k + 1)), display));
  }
}

TEST_CASE("the three forms agree") {
  const std::pair<double, double> cases[] = {{0.0, -1.0}, {3.0, 2.0}, {1.0, 1.0}, {-0.4, -2.5}};
  for (auto [a1, a2] : cases) {
    SecondOrderSpec s;
    s.alpha1 = Expr(a1);
    s.alpha2 = Expr(a2);
    s.y0 = sin(th);
    s.y1 = th * th;
    s.N = 8;
    s.form = SecondOrderForm::Direct;
    GenSeries direct = second_order_series(s);
    s.form = SecondOrderForm::Cascade;
    GenSeries cascade = second_order_series(s);
    s.form = SecondOrderForm::PartialFraction;
    GenSeries partial = second_order_series(s);
    std::set<Word> words;
    for (const GenSeries* g : {&direct, &cascade, &partial}) {
      for (const auto& [w, a] : *g) words.insert(w);
    }
    for (const Word& w : words) {
      CHECK(same(direct.coeff(w), cascade.coeff(w)));
      CHECK(same(direct.coeff(w), partial.coeff(w)));
    }
  }
}

TEST_CASE("cascade equals the composition pattern") {
  const Scalar b1 = 2.0, b2 = -0.5;
  for (int N = 1; N <= 6; ++N) {
    SecondOrderSpec s;
    s.alpha1 = Expr(b1 + b2);
    s.alpha2 = Expr(b1 * b2);
    s.N = N;
    s.form = SecondOrderForm::Cascade;
    GenSeries c = second_order_series(s);
    // Coefficient of x0^{m+1} x1 is sum_j (-b1 D)^j (-b2 D)^{m-j}.
    for (int m = 0; m + 2 <= N; ++m) {
      DiffOp expected = DiffOp::zero(1);
      for (int j = 0; j <= m; ++j) {
        expected = expected + pow(scale(Expr(-b1), D()), j) * pow(scale(Expr(-b2), D()), m - j);
      }
      CHECK(equivalent(c.coeff(dx(m + 1)), expected));
    }
  }
}

TEST_CASE("builder errors") {
  SecondOrderSpec s;
  s.alpha1 = Expr(2.0);
  s.alpha2 = Expr(1.0);
  s.form = SecondOrderForm::PartialFraction;
  CHECK(kind_of([&] { second_order_series(s); }) == ErrorKind::RepeatedRoot);
  s.form = SecondOrderForm::Direct;
  CHECK_NOTHROW(second_order_series(s));
  s.alpha1 = th;
  CHECK(kind_of([&] { second_order_series(s); }) == ErrorKind::NonConstantCoefficients);
  TransportSpec t;
  t.at.theta = 2;
  CHECK(kind_of([&] { transport_series(t); }) == ErrorKind::IndexOutOfRange);
  t = TransportSpec{};
  t.V = Expr::t();
  CHECK_THROWS_AS(transport_series(t), Error);
}

TEST_CASE("factored form with constant roots matches the cascade") {
  SecondOrderSpec s;
  s.alpha1 = Expr(1.5);
  s.alpha2 = Expr(0.5);
  s.y0 = sin(th);
  s.y1 = cos(th);
  s.N = 6;
  s.form = SecondOrderForm::Cascade;
  GenSeries cascade = second_order_series(s);
  auto [b1, b2] = characteristic_roots(1.5, 0.5);
  GenSeries factored = second_order_factored(Expr(b1), Expr(b2), s.y0, s.y1, 6);
  CHECK(equivalent(cascade, factored, 6));
}

TEST_CASE("transport solves its PDE") {
  const Grid g = Grid::parse("0:6.283185307179586:801,0:1:801");
  TransportSpec s;
  s.V = Expr(1.0);
  s.y0 = cos(th);
  s.N = 14;
  const Expr u = parse_expr("t*sin(2*theta_1)", 1);
  const Array y = evaluate_series(transport_series(s), {{1, InputSignal::symbolic(u)}}, g).values();
  const Array residual = gradient_time(y, g) + gradient_theta(y, g, 1) - sample(u, g);
  double worst = 0.0;
  const Eigen::Index n = g.time_points();
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    const Eigen::Index i = g.index(r, 1);
    if (i == 0 || i == 800) continue;
    worst = std::max(worst, residual.row(r).segment(1, n - 2).abs().maxCoeff());
  }
  CHECK(worst / (1.0 + sample(u, g).abs().maxCoeff()) <= 1e-4);
}

TEST_CASE("initial condition is exact") {
  const Grid g = Grid::parse("0:3:31,0:1:9");
  TransportSpec s;
  s.V = Expr(2.0);
  s.y0 = exp(th) * sin(th);
  s.N = 10;
  const Array y =
      evaluate_series(transport_series(s), {{1, InputSignal::symbolic(Expr::t())}}, g).values();
  const ThetaArray y0 = sample_theta(s.y0, g);
  CHECK((y.col(0) - y0).abs().maxCoeff() == 0.0);
}
