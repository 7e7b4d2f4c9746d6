#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cf/diffop.hpp"
#include "cf/error.hpp"
#include "cf/verify.hpp"

using namespace cf;

namespace {

const Expr th = Expr::theta(1);

DiffOp D(int order = 1) { return DiffOp::derivative(1, 1, order); }
DiffOp mul(const Expr& a) { return DiffOp::multiplication(1, a); }

Scalar at(const Expr& e, double x) {
  const double theta[1] = {x};
  return evaluate(e, Point{0.0, theta});
}

// Degree <= 2 operator with polynomial or trigonometric coefficients.
DiffOp random_op(std::mt19937& rng) {
  std::uniform_real_distribution<double> c(-2.0, 2.0);
  std::uniform_int_distribution<int> kind(0, 3);
  auto coef = [&]() -> Expr {
    switch (kind(rng)) {
      case 0: return Expr(c(rng));
      case 1: return Expr(c(rng)) * th + Expr(c(rng));
      case 2: return Expr(c(rng)) * sin(Expr(c(rng)) * th);
      default: return Expr(c(rng)) * th * th + Expr(c(rng)) * cos(th);
    }
  };
  DiffOp op(1);
  for (int k = 0; k <= 2; ++k) op.add_term(MultiIndex{k}, coef());
  return op;
}

}  // namespace

TEST_CASE("apply examples") {
  CHECK(std::abs(at(apply(DiffOp::term(th, MultiIndex{1}), th * th), 1.3) - 2 * 1.3 * 1.3) < 1e-14);
  Expr f = sin(th) * th;
  CHECK(structurally_equal(apply(DiffOp::identity(1), f), f));
  const double V = 0.7, w = 2.0;
  Expr g = sin(Expr(w) * th);
  Expr r = apply(pow(scale(Expr(-V), D()), 2), g);
  CHECK(std::abs(at(r, 0.4) + V * V * w * w * std::sin(w * 0.4)) < 1e-13);
}

TEST_CASE("multiplication examples") {
  DiffOp a = DiffOp::term(th, MultiIndex{1});
  DiffOp b = DiffOp::term(th * th, MultiIndex{1});
  DiffOp ab = a * b;
  DiffOp expected = DiffOp::term(Expr(2.0) * th * th, MultiIndex{1}) +
                    DiffOp::term(pow(th, 3), MultiIndex{2});
  CHECK(equivalent(ab, expected));
  CHECK(same_action(ab, expected, test_functions(), 10, 1e-9));

  DiffOp weyl = D() * mul(th);
  CHECK(equivalent(weyl, mul(th) * D() + DiffOp::identity(1)));

  DiffOp c = DiffOp::term(Expr(2.0), MultiIndex{1}) * DiffOp::term(Expr(3.0), MultiIndex{2});
  CHECK(c.size() == 1);
  CHECK(c.coeff(MultiIndex{3}).value() == Scalar(6.0));
}

TEST_CASE("powers and sums") {
  const Expr V(1.5);
  CHECK(equivalent(pow(scale(-V, D()), 0), DiffOp::identity(1)));
  CHECK(equivalent(pow(scale(-V, D()), 2), DiffOp::term(V * V, MultiIndex{2})));
  CHECK((DiffOp::term(th, MultiIndex{1}) + DiffOp::term(-th, MultiIndex{1})).is_zero());
  CHECK((DiffOp::term(sin(th) * sin(th), MultiIndex{0}) +
         DiffOp::term(cos(th) * cos(th) - Expr(1.0), MultiIndex{0}))
            .is_zero());
}

TEST_CASE("morphism law") {
  std::mt19937 rng(2024);
  for (int n = 0; n < 50; ++n) {
    DiffOp A = random_op(rng), B = random_op(rng);
    DiffOp AB = A * B;
    for (const Expr& f : test_functions()) {
      Expr lhs = apply(AB, f);
      Expr rhs = apply(A, apply(B, f));
      for (double x : {-1.2, -0.3, 0.05, 0.4, 0.9, 1.1, 1.4, -0.8, 0.6, -1.45}) {
        Scalar l = at(lhs, x), r = at(rhs, x);
        CHECK(std::abs(l - r) <= 1e-9 * std::max(1.0, std::abs(r)));
      }
    }
  }
}

TEST_CASE("associativity") {
  std::mt19937 rng(99);
  for (int n = 0; n < 20; ++n) {
    DiffOp A = random_op(rng), B = random_op(rng), C = random_op(rng);
    CHECK(same_action((A * B) * C, A * (B * C), test_functions(), 10, 1e-9));
  }
}

TEST_CASE("Weyl relation acts as the identity") {
  DiffOp comm = D() * mul(th) - mul(th) * D();
  for (const Expr& f : test_functions()) {
    Expr g = apply(comm, f);
    for (double x : {-1.0, 0.2, 0.9}) CHECK(std::abs(at(g, x) - at(f, x)) <= 1e-12);
  }
}

TEST_CASE("text format round trip") {
  DiffOp op = DiffOp::term(th, MultiIndex{1}) + DiffOp::identity(1);
  const std::string s = op.str();
  CHECK(s.find("1 * D[0]") != std::string::npos);
  CHECK(parse_diffop(s, 1).str() == s);
  CHECK(DiffOp::identity(2).str() == "1 * D[0,0]");
  CHECK(DiffOp::zero(1).str() == "0");
}

TEST_CASE("degree cap") {
  CHECK_THROWS_AS(pow(D(), 65), Error);
  CHECK_NOTHROW(pow(D(), 64));
}

TEST_CASE("support and relabel") {
  DiffOp op = DiffOp::term(Expr::theta(2), MultiIndex{1, 0});
  CHECK(op.support() == std::vector<int>{1, 2});
  DiffOp r = op.relabeled(3, [](int k) { return k + 1; });
  CHECK(r.support() == std::vector<int>{2, 3});
  CHECK(!op.has_constant_coefficients());
}
