#include "cf/pde.hpp"

#include <cmath>

#include "cf/error.hpp"

namespace cf {

namespace {

void check_placement(const Placement& at) {
  if (at.theta < 1 || at.theta > at.dim) {
    throw Error(ErrorKind::IndexOutOfRange, "theta_" + std::to_string(at.theta) +
                                                " outside dimension " + std::to_string(at.dim));
  }
}

void check_truncation(int N) {
  if (N < 0) throw Error(ErrorKind::InvalidArgument, "truncation N must be >= 0");
}

void check_theta_only(const Expr& e, std::string_view what) {
  if (e.depends_on(Variable::time())) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " must not depend on t");
  }
}

DiffOp D(const Placement& at, int order = 1) { return DiffOp::derivative(at.dim, at.theta, order); }

// x0^k followed by x_input.
Word input_word(int k, const Placement& at) {
  return Word::drift_power(k) * Word{Letter::input(at.input)};
}

// Assembles y = sum_m p_m y0 x0^m + p_m g x0^{m+1} + p_m x0^{m+1} x1, words of
// length <= N, where g = y1 + alpha1 y0'.
GenSeries assemble(const std::vector<DiffOp>& p, const Expr& y0, const Expr& g, int N,
                   const Placement& at) {
  GenSeries c(at.dim, N);
  c.add_letter(Letter::input(at.input));
  for (int m = 0; m <= N; ++m) {
    const DiffOp& pm = p[static_cast<std::size_t>(m)];
    if (pm.is_zero()) continue;
    c.add(Word::drift_power(m), DiffOp::multiplication(at.dim, apply(pm, y0)));
    if (m + 1 <= N) c.add(Word::drift_power(m + 1), DiffOp::multiplication(at.dim, apply(pm, g)));
    if (m + 2 <= N) c.add(input_word(m + 1, at), pm);
  }
  return c;
}

}  // namespace

GenSeries transport_series(const TransportSpec& spec) {
  check_truncation(spec.N);
  check_placement(spec.at);
  check_theta_only(spec.V, "V");
  check_theta_only(spec.y0, "y0");
  const Placement& at = spec.at;
  const DiffOp step = scale(-spec.V, D(at));
  GenSeries c(at.dim, spec.N + 1);
  c.add_letter(Letter::input(at.input));
  DiffOp power = DiffOp::identity(at.dim);
  Expr transported = spec.y0;
  for (int k = 0; k <= spec.N + 1; ++k) {
    if (k > 0) transported = apply(step, transported);
    c.set(Word::drift_power(k), DiffOp::multiplication(at.dim, transported));
    if (k <= spec.N) {
      c.set(input_word(k, at), power);
      power = step * power;
    }
  }
  return c;
}

GenSeries first_order_inverse(const Expr& beta, int N, Placement at) {
  check_truncation(N);
  check_placement(at);
  check_theta_only(beta, "beta");
  const DiffOp step = scale(-beta, D(at));
  GenSeries c(at.dim, N);
  c.add_letter(Letter::input(at.input));
  c.set(Word{}, DiffOp::identity(at.dim));
  DiffOp power = DiffOp::identity(at.dim);
  for (int k = 1; k <= N; ++k) {
    power = step * power;
    c.set(input_word(k - 1, at), power);
  }
  return c;
}

GenSeries first_order_operator(const Expr& beta, Placement at) {
  check_placement(at);
  check_theta_only(beta, "beta");
  GenSeries c(at.dim, 1);
  c.add_letter(Letter::input(at.input));
  c.set(Word{}, DiffOp::identity(at.dim));
  c.set(Word{Letter::input(at.input)}, scale(beta, D(at)));
  return c;
}

std::pair<Scalar, Scalar> characteristic_roots(Scalar alpha1, Scalar alpha2) {
  const Scalar disc = std::sqrt(alpha1 * alpha1 - 4.0 * alpha2);
  Scalar r1 = 0.5 * (alpha1 + disc);
  Scalar r2 = 0.5 * (alpha1 - disc);
  auto before = [](Scalar a, Scalar b) {
    return a.real() > b.real() || (a.real() == b.real() && a.imag() > b.imag());
  };
  if (before(r2, r1)) std::swap(r1, r2);
  return {r1, r2};
}

GenSeries second_order_series(const SecondOrderSpec& spec) {
  check_truncation(spec.N);
  check_placement(spec.at);
  check_theta_only(spec.y0, "y0");
  check_theta_only(spec.y1, "y1");
  if (!spec.alpha1.is_constant() || !spec.alpha2.is_constant()) {
    throw Error(ErrorKind::NonConstantCoefficients,
                "alpha1 and alpha2 must be constants; use second_order_factored with an "
                "explicit factorization");
  }
  const Placement& at = spec.at;
  const Scalar a1 = spec.alpha1.value();
  const Scalar a2 = spec.alpha2.value();
  const int N = spec.N;
  std::vector<DiffOp> p(static_cast<std::size_t>(N) + 1, DiffOp::zero(at.dim));

  switch (spec.form) {
    case SecondOrderForm::Direct: {
      // p_m = -alpha1 D p_{m-1} - alpha2 D^2 p_{m-2}.
      const DiffOp d1 = scale(Expr(-a1), D(at));
      const DiffOp d2 = scale(Expr(-a2), D(at, 2));
      for (int m = 0; m <= N; ++m) {
        auto um = static_cast<std::size_t>(m);
        if (m == 0) {
          p[um] = DiffOp::identity(at.dim);
          continue;
        }
        p[um] = d1 * p[um - 1];
        if (m >= 2) p[um] = p[um] + d2 * p[um - 2];
      }
      break;
    }
    case SecondOrderForm::Cascade: {
      auto [b1, b2] = characteristic_roots(a1, a2);
      const GenSeries inverse =
          compose_unital(first_order_inverse(Expr(b2), N, at), first_order_inverse(Expr(b1), N, at));
      p[0] = DiffOp::identity(at.dim);
      for (int m = 1; m <= N; ++m) p[static_cast<std::size_t>(m)] = inverse.coeff(input_word(m - 1, at));
      break;
    }
    case SecondOrderForm::PartialFraction: {
      auto [b1, b2] = characteristic_roots(a1, a2);
      if (std::abs(b1 - b2) <= 1e-12) {
        throw Error(ErrorKind::RepeatedRoot, "partial fractions need distinct roots");
      }
      const Expr w1(b1 / (b1 - b2));
      const Expr w2(b2 / (b2 - b1));
      const DiffOp s1 = scale(Expr(-b1), D(at));
      const DiffOp s2 = scale(Expr(-b2), D(at));
      DiffOp q1 = DiffOp::identity(at.dim);
      DiffOp q2 = DiffOp::identity(at.dim);
      for (int m = 0; m <= N; ++m) {
        if (m > 0) {
          q1 = s1 * q1;
          q2 = s2 * q2;
        }
        p[static_cast<std::size_t>(m)] = scale(w1, q1) + scale(w2, q2);
      }
      break;
    }
  }
  const Expr g = spec.y1 + spec.alpha1 * differentiate(spec.y0, Variable::theta(at.theta));
  return assemble(p, spec.y0, g, N, at);
}

GenSeries second_order_factored(const Expr& beta1, const Expr& beta2, const Expr& y0,
                                const Expr& y1, int N, Placement at) {
  check_truncation(N);
  check_placement(at);
  check_theta_only(y0, "y0");
  check_theta_only(y1, "y1");
  const GenSeries inverse =
      compose_unital(first_order_inverse(beta2, N, at), first_order_inverse(beta1, N, at));
  std::vector<DiffOp> p(static_cast<std::size_t>(N) + 1, DiffOp::zero(at.dim));
  p[0] = DiffOp::identity(at.dim);
  for (int m = 1; m <= N; ++m) p[static_cast<std::size_t>(m)] = inverse.coeff(input_word(m - 1, at));
  const Expr g = y1 + (beta1 + beta2) * differentiate(y0, Variable::theta(at.theta));
  return assemble(p, y0, g, N, at);
}

GenSeries wave_series(int N, Placement at) {
  SecondOrderSpec spec;
  spec.alpha1 = Expr(0.0);
  spec.alpha2 = Expr(-1.0);
  spec.N = N;
  spec.at = at;
  return second_order_series(spec);
}

}  // namespace cf
