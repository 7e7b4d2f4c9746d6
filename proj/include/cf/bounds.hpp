#pragma once

#include <optional>
#include <vector>

#include "cf/diffop.hpp"
#include "cf/grid.hpp"
#include "cf/iterint.hpp"

namespace cf {

// i^i j^j T^{i+j} / (i! j! (i+j)^{i+j}) * norm1, with 0^0 = 1.
double holder_bound(int i, int j, double T, double norm1);

// max over i+j <= max_degree of i^i j^j (i+j)! / (i! j! (i+j)^{i+j}).
struct StirlingConstant {
  double value = 1.0;
  int argmax_i = 0;
  int argmax_j = 0;
  int max_degree = 0;
  // The per-degree maximum stays <= value and is non-increasing on
  // degrees (max_degree, 2 max_degree].
  bool certified = false;
  int window_end = 0;
};

StirlingConstant stirling_KE(int max_degree);

// Growth hypotheses: ||alpha_k|| <= K_alpha M^k (k!)^s, ||D^k u||_1 <= K_u R^k.
struct GrowthData {
  double K_alpha = 1.0;
  double M = 0.0;
  double K_u = 1.0;
  double R = 0.0;
  double s = 0.0;
  double T = 1.0;
  double width = 1.0;  // b - a
  // Computed by stirling_KE when absent.
  std::optional<double> K_E;
};

struct GeometricBound {
  bool converges = false;
  double mrt = 0.0;
  double bound = 0.0;  // +inf when divergent
};

// Requires s = 1: converges iff M R T < 1, bound K_alpha K_E K_u / (1 - MRT)^2.
GeometricBound geometric_bound(const GrowthData& g);

struct TailBound {
  double value = 0.0;
  int terms = 0;
  bool converged = false;
};

// K_alpha K_E K_u sum_{k > N} (k+1) (MRT)^k (k!)^{s-1} for 0 <= s < 1.
// N = -1 gives the full sum.
TailBound gevrey_tail(const GrowthData& g, int N);

// How norms of theta-derivatives of an input are measured.
enum class NormKind {
  L1,           // tensor trapezoid over Theta x [0, T]
  SupEnvelope,  // |Theta| * int_0^T sup_theta |f| dt
};

double field_norm(const Array& f, const Grid& g, NormKind kind);

// Least-squares fit of log ||x_k|| = log K + k log rate (+ s log k!).
struct GrowthFit {
  double K = 0.0;
  double rate = 0.0;
  double s = 0.0;
  double residual = 0.0;  // rms of the log residuals
  int used = 0;           // number of norms in the fit
  bool zero_rate = false; // every norm past k = 0 vanished
  std::vector<double> norms;
};

// Fits K_u and R from ||D_theta^k u|| for k = 0..k_max.
GrowthFit estimate_input_growth(const InputSignal& u, const Grid& g, int k_max, int theta = 1,
                                NormKind kind = NormKind::SupEnvelope);
// Fits K_alpha, M and s from the sup-norms of the operators alpha_0, alpha_1, ...
// (sum over terms of the sup over the grid of |coefficient|).
GrowthFit estimate_coefficient_growth(const std::vector<DiffOp>& alpha, const Grid& g);

// Sup over the theta grid of sum_alpha |a_alpha(theta)|.
double sup_norm(const DiffOp& a, const Grid& g);

}  // namespace cf
