#pragma once

#include <utility>

#include "cf/series.hpp"

namespace cf {

// Where a single-parameter builder places its parameter and input letter.
struct Placement {
  int dim = 1;    // parameter-space dimension of the result
  int theta = 1;  // the theta_k the equation differentiates in
  int input = 1;  // id of the input letter
};

// dy/dt + V dy/dtheta = u, y(theta, 0) = y0(theta).
struct TransportSpec {
  Expr V = Expr(1.0);
  Expr y0 = Expr(0.0);
  int N = 8;
  Placement at{};
};

// Coefficients (-V D)^k y0 on x0^k (k <= N+1) and (-V D)^k on x0^k x1 (k <= N).
GenSeries transport_series(const TransportSpec& spec);

// (I + beta D E_x1)^{-1} = I + sum_{k=1}^N (-beta D)^k E_{x0^{k-1} x1}, in the
// operator form used by compose_unital (the e coefficient 1 stands for I).
GenSeries first_order_inverse(const Expr& beta, int N, Placement at = {});
// I + beta D E_x1 in the same form.
GenSeries first_order_operator(const Expr& beta, Placement at = {});

enum class SecondOrderForm { Direct, Cascade, PartialFraction };

// y_tt + alpha1 y_{t theta} + alpha2 y_{theta theta} = u with
// y(theta, 0) = y0, y_t(theta, 0) = y1.
struct SecondOrderSpec {
  Expr alpha1 = Expr(0.0);
  Expr alpha2 = Expr(0.0);
  Expr y0 = Expr(0.0);
  Expr y1 = Expr(0.0);
  int N = 8;
  SecondOrderForm form = SecondOrderForm::Direct;
  Placement at{};
};

// Roots of r^2 - alpha1 r + alpha2, larger real part first (ties: larger
// imaginary part).
std::pair<Scalar, Scalar> characteristic_roots(Scalar alpha1, Scalar alpha2);

// Words x0^m carry p_m y0, x0^{m+1} carry p_m (y1 + alpha1 y0'), x0^{m+1} x1
// carry p_m, where p_m is the m-th operator of (I + alpha1 D E_x1 +
// alpha2 D^2 E_x0x1)^{-1}; all words have length <= N. Throws
// NonConstantCoefficients for theta-dependent alpha and RepeatedRoot for the
// partial-fraction form with a double root.
GenSeries second_order_series(const SecondOrderSpec& spec);

// Cascade form from a user-supplied factorization (I + beta1 D E_x1) o
// (I + beta2 D E_x1); beta may depend on theta.
GenSeries second_order_factored(const Expr& beta1, const Expr& beta2, const Expr& y0,
                                const Expr& y1, int N, Placement at = {});

// y_tt = y_{theta theta} + u with zero initial data.
GenSeries wave_series(int N, Placement at = {});

}  // namespace cf
