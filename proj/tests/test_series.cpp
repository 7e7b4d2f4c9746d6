#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cf/error.hpp"
#include "cf/iterint.hpp"
#include "cf/pde.hpp"
#include "cf/series.hpp"
#include "cf/verify.hpp"

using namespace cf;

namespace {

const Letter x0 = Letter::drift();
const Letter x1 = Letter::input(1);
const Letter x2 = Letter::input(2);

DiffOp D(int dim, int k, int order = 1) { return DiffOp::derivative(dim, k, order); }

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

GenSeries sample_series() {
  GenSeries c(1, 3);
  const Expr th = Expr::theta(1);
  c.set(Word{}, DiffOp::multiplication(1, sin(th)));
  c.set(Word{x1}, DiffOp::term(th, MultiIndex{1}));
  c.set(Word{x0, x1}, DiffOp::derivative(1, 1, 2));
  c.set(Word{x0, x0, x1}, DiffOp::multiplication(1, Expr(0.5)));
  return c;
}

InputMap one_input(const Expr& u, int id = 1) { return {{id, InputSignal::symbolic(u)}}; }

}  // namespace

TEST_CASE("parallel sum") {
  GenSeries c = sample_series();
  GenSeries zero(1, 3);
  CHECK(equivalent(c + zero, c, 3));
  CHECK((c + scale(Expr(-1.0), c)).size() == 0);

  TransportSpec a;
  a.V = Expr(2.0);
  a.N = 3;
  TransportSpec b;
  b.V = Expr(-0.5);
  b.N = 3;
  b.at.input = 2;
  GenSeries sum = parallel_sum(transport_series(a), transport_series(b), SupportPolicy::Concatenate);
  CHECK(sum.dim() == 2);
  for (int k = 0; k <= 3; ++k) {
    Word wc = Word::drift_power(k) * Word{x1};
    Word wd = Word::drift_power(k) * Word{x2};
    CHECK(equivalent(sum.coeff(wc), pow(scale(Expr(-2.0), D(2, 1)), k)));
    CHECK(equivalent(sum.coeff(wd), pow(scale(Expr(0.5), D(2, 2)), k)));
  }
}

TEST_CASE("shuffle of disjoint series") {
  GenSeries c(2, 1), d(2, 1);
  c.set(Word{x1}, D(2, 1));
  d.set(Word{x2}, D(2, 2));
  GenSeries cd = shuffle_series(c, d);
  DiffOp both = D(2, 1) * D(2, 2);
  CHECK(equivalent(cd.coeff(Word{x1, x2}), both));
  CHECK(equivalent(cd.coeff(Word{x2, x1}), both));
  CHECK(cd.size() == 2);
  CHECK(equivalent(shuffle_series(sample_series(), GenSeries::unit(1)), sample_series(), 3));
}

TEST_CASE("shuffle rejects shared parameters") {
  GenSeries c(1, 1);
  c.set(Word{x1}, D(1, 1));
  CHECK(kind_of([&] { shuffle_series(c, c); }) == ErrorKind::OverlappingSupport);
  GenSeries naive = shuffle_series_naive(c, c);
  CHECK(equivalent(naive.coeff(Word{x1, x1}), scale(Expr(2.0), D(1, 1, 2))));
}

TEST_CASE("composition examples") {
  const Expr th = Expr::theta(1);
  GenSeries c(1, 1), d(1, 1);
  c.set(Word{x1}, DiffOp::term(th, MultiIndex{1}));
  d.set(Word{x1}, DiffOp::term(th * th, MultiIndex{1}));
  GenSeries cd = compose(c, d);
  CHECK(cd.size() == 1);
  CHECK(same_action(cd.coeff(Word{x0, x1}), c.coeff(Word{x1}) * d.coeff(Word{x1}),
                    test_functions(), 10, 1e-9));

  for (int k = 0; k <= 4; ++k) {
    for (int l = 0; k + l <= 4; ++l) {
      GenSeries a(1, k + 1), b(1, l + 1);
      DiffOp A = DiffOp::term(Expr(1.0) + th, MultiIndex{1});
      DiffOp B = DiffOp::term(cos(th), MultiIndex{2});
      a.set(Word::drift_power(k) * Word{x1}, A);
      b.set(Word::drift_power(l) * Word{x1}, B);
      GenSeries ab = compose(a, b);
      CHECK(ab.size() == 1);
      CHECK(equivalent(ab.coeff(Word::drift_power(k + l + 1) * Word{x1}), A * B));
    }
  }

  GenSeries constant = GenSeries::constant(DiffOp::multiplication(1, sin(th)));
  GenSeries r = compose(constant, sample_series());
  CHECK(r.size() == 1);
  CHECK(equivalent(r.coeff(Word{}), DiffOp::multiplication(1, sin(th))));
}

TEST_CASE("composition needs a linear left factor") {
  GenSeries c(1, 2);
  c.set(Word{x1, x1}, DiffOp::identity(1));
  CHECK(kind_of([&] { compose(c, sample_series()); }) == ErrorKind::NotLinear);
}

TEST_CASE("composition preserves linearity") {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Expr th = Expr::theta(1);
  for (int n = 0; n < 10; ++n) {
    GenSeries c(1, 3), d(1, 3);
    for (int k = 0; k < 3; ++k) {
      c.set(Word::drift_power(k) * Word{x1}, DiffOp::term(Expr(u(rng)) * th, MultiIndex{k % 2}));
      d.set(Word::drift_power(k) * Word{x1}, DiffOp::term(Expr(u(rng)), MultiIndex{1}));
      d.set(Word::drift_power(k), DiffOp::multiplication(1, Expr(u(rng))));
    }
    CHECK(is_linear(compose(c, d)));
  }
}

TEST_CASE("left shift") {
  GenSeries c(1, 1);
  c.set(Word{}, DiffOp::multiplication(1, sin(Expr::theta(1))));
  c.set(Word{x1}, DiffOp::identity(1));
  GenSeries s = left_shift(x1, c);
  CHECK(s.size() == 1);
  CHECK(equivalent(s.coeff(Word{}), DiffOp::identity(1)));
  CHECK(left_shift(x0, c).size() == 0);

  GenSeries a(1, 2);
  DiffOp A = DiffOp::term(Expr::theta(1), MultiIndex{2});
  a.set(Word{x0, x1}, A);
  CHECK(equivalent(left_shift(x0, a).coeff(Word{x1}), A));

  GenSeries big = sample_series();
  for (Letter l : {x0, x1}) {
    GenSeries shifted = left_shift(l, big);
    for (const auto& [w, coef] : big) {
      if (w.empty() || w[0] != l) continue;
      Word rest(std::vector<Letter>(w.begin() + 1, w.end()));
      CHECK(equivalent(shifted.coeff(rest), coef));
    }
  }
}

TEST_CASE("truncate and linear part") {
  GenSeries c = sample_series();
  GenSeries t = truncate(c, 0);
  CHECK(t.size() == 1);
  CHECK(t.contains(Word{}));
  GenSeries n(1, 2);
  n.set(Word{x1}, DiffOp::identity(1));
  n.set(Word{x1, x1}, DiffOp::identity(1));
  GenSeries lin = linear_part(n);
  CHECK(!lin.contains(Word{x1, x1}));
  CHECK(lin.contains(Word{x1}));
  TransportSpec spec;
  spec.N = 6;
  CHECK(is_linear(transport_series(spec)));
}

TEST_CASE("parallel sum morphism on a grid") {
  const Grid g = Grid::parse("0:1:17,0:1:33");
  GenSeries c = sample_series();
  GenSeries d(1, 2);
  d.set(Word{x1, x0}, DiffOp::term(cos(Expr::theta(1)), MultiIndex{1}));
  d.set(Word{x0}, DiffOp::multiplication(1, Expr(2.0)));
  const InputMap u = one_input(parse_expr("sin(theta_1 + t)", 1));
  const Array lhs = evaluate_series(c + d, u, g).values();
  const Array rhs = evaluate_series(c, u, g).values() + evaluate_series(d, u, g).values();
  CHECK((lhs - rhs).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("shuffle morphism on a coarse grid") {
  const Grid g = Grid::parse("-1:1:9,-1:1:9,0:1:257");
  GenSeries c(2, 2), d(2, 2);
  c.set(Word{}, DiffOp::multiplication(2, Expr(1.0)));
  c.set(Word{x1}, D(2, 1));
  d.set(Word{}, DiffOp::multiplication(2, Expr(0.5)));
  d.set(Word{x2, x0}, DiffOp::multiplication(2, cos(Expr::theta(2))));
  InputMap u;
  u.emplace(1, InputSignal::symbolic(parse_expr("sin(theta_1) + t", 2)));
  u.emplace(2, InputSignal::symbolic(parse_expr("theta_2*t", 2)));
  const Array lhs = evaluate_series(shuffle_series(c, d), u, g).values();
  const Array rhs = evaluate_series(c, u, g).values() * evaluate_series(d, u, g).values();
  // Trapezoid error of the discrete product rule, O(h_t^2).
  CHECK((lhs - rhs).abs().maxCoeff() <= 1e-4);
}

TEST_CASE("composition matches the operator cascade") {
  const Grid g = Grid::parse("0:1:401,0:1:513");
  const Expr th = Expr::theta(1);
  GenSeries c(1, 2), d(1, 2);
  c.set(Word{x1}, DiffOp::term(th, MultiIndex{1}));
  c.set(Word{x0, x1}, DiffOp::multiplication(1, Expr(0.5)));
  d.set(Word{}, DiffOp::multiplication(1, sin(th)));
  d.set(Word{x1}, DiffOp::term(th * th, MultiIndex{1}));
  const InputMap u = one_input(parse_expr("cos(theta_1 + t) + t*theta_1^2", 1));
  const GridField inner = evaluate_series(d, u, g);
  const Array cascade = evaluate_series(c, {{1, InputSignal::sampled(inner)}}, g).values();
  const Array direct = evaluate_series(compose(c, d), u, g).values();
  CHECK((cascade - direct).abs().maxCoeff() <= 1e-4);
}

TEST_CASE("series text round trip") {
  GenSeries c = sample_series();
  c.declare_support({1});
  const std::string s = to_string(c);
  GenSeries back = parse_series(s);
  CHECK(to_string(back) == s);
  CHECK(equivalent(back, c, 3));
  CHECK(kind_of([] { parse_series("dim=1 maxlen=1 alphabet=x0\nx1 :: 1 * D[0]\n"); }) ==
        ErrorKind::UnboundLetter);
  CHECK(kind_of([] { parse_series("dim=1 maxlen=1 alphabet=x0\nx0 x0 :: 1 * D[0]\n"); }) ==
        ErrorKind::InvalidArgument);
}

TEST_CASE("truncation metadata") {
  GenSeries c = sample_series();
  CHECK(c.max_len() == 3);
  CHECK_THROWS_AS(c.set(Word{x0, x0, x0, x1}, DiffOp::identity(1)), Error);
  GenSeries cd = compose(c, c);
  CHECK(cd.max_len() == 7);
  CHECK(cd.exact_len() <= cd.max_len());
}
