#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cf/bounds.hpp"
#include "cf/error.hpp"
#include "cf/pde.hpp"

using namespace cf;

namespace {

const Letter x0 = Letter::drift();
const Letter x1 = Letter::input(1);

GrowthData unit_data(double mrt, double s) {
  GrowthData d;
  d.K_alpha = 1.0;
  d.K_u = 1.0;
  d.K_E = 1.0;
  d.M = mrt;
  d.R = 1.0;
  d.T = 1.0;
  d.s = s;
  return d;
}

}  // namespace

TEST_CASE("holder bound values") {
  CHECK(holder_bound(0, 0, 2.0, 3.5) == 3.5);
  CHECK(holder_bound(1, 1, 1.0, 1.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(holder_bound(-1, 0, 1.0, 1.0), Error);
}

TEST_CASE("holder bound is symmetric") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> T(0.1, 3.0);
  for (int i = 0; i <= 10; ++i) {
    for (int j = 0; j <= 10; ++j) {
      const double t = T(rng);
      CHECK(holder_bound(i, j, t, 1.3) == doctest::Approx(holder_bound(j, i, t, 1.3)).epsilon(1e-14));
    }
  }
}

TEST_CASE("holder bound for inputs constant in theta") {
  // With u independent of theta on a unit-width Theta the joint L1 norm is the
  // time L1 norm and the pointwise bound applies.
  const Grid g = Grid::parse("0:1:3,0:1:1025");
  const Expr u = parse_expr("1 + sin(3*t)", 1);
  const InputMap in = {{1, InputSignal::symbolic(u)}};
  const double norm = field_norm(sample(u, g), g, NormKind::L1);
  for (int i = 0; i <= 3; ++i) {
    for (int j = 0; j <= 3; ++j) {
      Word w = Word::drift_power(i) * Word{x1} * Word::drift_power(j);
      const Array e = iterated_integral(DecoratedWord(w, 1), in, g).values();
      CHECK(e.abs().maxCoeff() <= holder_bound(i, j, 1.0, norm) * (1 + 1e-9));
    }
  }
}

TEST_CASE("holder bound fails for theta-varying inputs under the joint norm") {
  // u = theta on [0,1]^2: E_{x0 x1 x0}[u](1, 1) = 1/6 while the bound gives
  // ||u||_1 / 4 = 1/8.
  const Grid g = Grid::parse("0:1:65,0:1:257");
  const Expr u = Expr::theta(1);
  const InputMap in = {{1, InputSignal::symbolic(u)}};
  const Array e = iterated_integral(DecoratedWord(Word{x0, x1, x0}, 1), in, g).values();
  const double norm = field_norm(sample(u, g), g, NormKind::L1);
  CHECK(norm == doctest::Approx(0.5));
  CHECK(e.abs().maxCoeff() == doctest::Approx(1.0 / 6.0).epsilon(1e-4));
  CHECK(e.abs().maxCoeff() > holder_bound(1, 1, 1.0, norm));
}

TEST_CASE("stirling constant") {
  CHECK(stirling_KE(0).value == 1.0);
  StirlingConstant k = stirling_KE(50);
  CHECK(k.value == doctest::Approx(1.0));
  CHECK(k.value <= 1.0);
  CHECK(k.certified);
  CHECK(k.window_end == 100);
}

TEST_CASE("geometric bound") {
  GeometricBound b = geometric_bound(unit_data(0.5, 1.0));
  CHECK(b.converges);
  CHECK(b.bound == 4.0);
  CHECK(!geometric_bound(unit_data(1.0, 1.0)).converges);
  GrowthData d = unit_data(0.0, 1.0);
  d.K_alpha = 2.0;
  d.K_u = 3.0;
  CHECK(geometric_bound(d).bound == 6.0);
  CHECK_THROWS_AS(geometric_bound(unit_data(0.5, 0.5)), Error);
}

TEST_CASE("gevrey tail") {
  TailBound full = gevrey_tail(unit_data(1.0, 0.0), -1);
  CHECK(full.converged);
  CHECK(std::abs(full.value - 2 * std::exp(1.0)) <= 1e-12);
  TailBound t8 = gevrey_tail(unit_data(1.0, 0.0), 8);
  double direct = 0.0;
  for (int k = 9; k < 40; ++k) direct += (k + 1) / std::tgamma(k + 1.0);
  CHECK(t8.value == doctest::Approx(direct).epsilon(1e-12));
  CHECK(gevrey_tail(unit_data(3.0, 0.5), 4).converged);
  CHECK_THROWS_AS(gevrey_tail(unit_data(1.0, 1.0), 0), Error);
}

TEST_CASE("growth estimates") {
  const Grid g = Grid::parse("0:6.283185307179586:257,0:1:129");
  GrowthFit flat = estimate_input_growth(InputSignal::symbolic(parse_expr("t^2", 1)), g, 6);
  CHECK(flat.zero_rate);
  GrowthFit wave = estimate_input_growth(InputSignal::symbolic(parse_expr("t*sin(3*theta_1)", 1)), g, 8);
  CHECK(wave.rate == doctest::Approx(3.0).epsilon(1e-3));

  TransportSpec s;
  s.V = Expr(1.7);
  s.N = 10;
  GenSeries c = transport_series(s);
  std::vector<DiffOp> alpha;
  for (int k = 0; k <= 10; ++k) alpha.push_back(c.coeff(Word::drift_power(k) * Word{x1}));
  GrowthFit fit = estimate_coefficient_growth(alpha, g);
  CHECK(std::abs(fit.s) < 1e-9);
  CHECK(fit.rate == doctest::Approx(1.7).epsilon(1e-9));
  CHECK(estimate_coefficient_growth({DiffOp::identity(1)}, g).zero_rate);
  CHECK_THROWS_AS(estimate_coefficient_growth({DiffOp::identity(1), DiffOp::derivative(1, 1)}, g),
                  Error);
}

TEST_CASE("tail certificate covers the truncation error") {
  const Grid g = Grid::parse("0:6.283185307179586:129,0:1:257");
  const Expr u = parse_expr("t*sin(2*theta_1)", 1);
  const InputMap in = {{1, InputSignal::symbolic(u)}};
  auto solve = [&](int N) {
    TransportSpec s;
    s.N = N;
    return evaluate_series(transport_series(s), in, g).values();
  };
  const Array reference = solve(30);
  GrowthFit uf = estimate_input_growth(InputSignal::symbolic(u), g, 8);
  GrowthData d;
  d.K_alpha = 1.0;
  d.M = 1.0;
  d.K_u = uf.K;
  d.R = uf.rate;
  d.T = 1.0;
  d.width = 2 * M_PI;
  for (int N : {4, 8, 12}) {
    const double err = (reference - solve(N)).abs().maxCoeff();
    CHECK(err <= gevrey_tail(d, N).value);
  }
}

TEST_CASE("geometric bound dominates the output") {
  const Grid g = Grid::parse("0:6.283185307179586:129,0:0.2:129");
  const Expr u = parse_expr("t*sin(2*theta_1)", 1);
  TransportSpec s;
  s.N = 20;
  const Array y =
      evaluate_series(transport_series(s), {{1, InputSignal::symbolic(u)}}, g).values();
  GrowthFit uf = estimate_input_growth(InputSignal::symbolic(u), g, 8);
  GrowthData d;
  d.M = 1.0;
  d.K_u = uf.K;
  d.R = uf.rate;
  d.T = 0.2;
  d.s = 1.0;
  GeometricBound b = geometric_bound(d);
  REQUIRE(b.converges);
  CHECK(y.abs().maxCoeff() <= b.bound);
}

TEST_CASE("norms") {
  const Grid g = Grid::parse("0:2:101,0:1:101");
  const Array one = Array::Ones(g.theta_points(), g.time_points());
  CHECK(field_norm(one, g, NormKind::L1) == doctest::Approx(2.0));
  CHECK(field_norm(one, g, NormKind::SupEnvelope) == doctest::Approx(2.0));
  CHECK(sup_norm(DiffOp::term(Expr::theta(1), MultiIndex{1}) + DiffOp::identity(1), g) ==
        doctest::Approx(3.0));
}
