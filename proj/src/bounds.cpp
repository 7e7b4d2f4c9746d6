#include "cf/bounds.hpp"

#include <Eigen/QR>
#include <cmath>
#include <limits>

#include "cf/error.hpp"

namespace cf {

namespace {

double xlogx(int x) { return x == 0 ? 0.0 : x * std::log(static_cast<double>(x)); }

// log of i^i j^j (i+j)! / (i! j! (i+j)^{i+j}); exactly 0 on the axes.
double log_maximand(int i, int j) {
  if (i == 0 || j == 0) return 0.0;
  const int n = i + j;
  return xlogx(i) + xlogx(j) + std::lgamma(n + 1.0) - std::lgamma(i + 1.0) -
         std::lgamma(j + 1.0) - xlogx(n);
}

double degree_max(int n, int* arg_i) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    double v = log_maximand(i, n - i);
    if (v > best) {
      best = v;
      if (arg_i) *arg_i = i;
    }
  }
  return best;
}

double resolve_KE(const GrowthData& g) {
  return g.K_E ? *g.K_E : stirling_KE(64).value;
}

void check_positive(const GrowthData& g) {
  if (!(g.K_alpha >= 0 && g.K_u >= 0 && g.M >= 0 && g.R >= 0 && g.T > 0)) {
    throw Error(ErrorKind::InvalidArgument, "growth constants must be nonnegative and T > 0");
  }
}

}  // namespace

double holder_bound(int i, int j, double T, double norm1) {
  if (i < 0 || j < 0) throw Error(ErrorKind::InvalidArgument, "negative drift count");
  if (i + j == 0) return norm1;
  const int n = i + j;
  const double log_factor = xlogx(i) + xlogx(j) + n * std::log(T) - std::lgamma(i + 1.0) -
                            std::lgamma(j + 1.0) - xlogx(n);
  return std::exp(log_factor) * norm1;
}

StirlingConstant stirling_KE(int max_degree) {
  if (max_degree < 0) throw Error(ErrorKind::InvalidArgument, "max_degree must be >= 0");
  StirlingConstant r;
  r.max_degree = max_degree;
  double best = -std::numeric_limits<double>::infinity();
  for (int n = 0; n <= max_degree; ++n) {
    int i = 0;
    double v = degree_max(n, &i);
    if (v > best) {
      best = v;
      r.argmax_i = i;
      r.argmax_j = n - i;
    }
  }
  r.value = std::exp(best);
  r.window_end = std::max(2 * max_degree, max_degree + 1);
  r.certified = true;
  double prev = degree_max(max_degree, nullptr);
  for (int n = max_degree + 1; n <= r.window_end; ++n) {
    double v = degree_max(n, nullptr);
    if (v > best + 1e-12 || v > prev + 1e-12) r.certified = false;
    prev = v;
  }
  return r;
}

GeometricBound geometric_bound(const GrowthData& g) {
  check_positive(g);
  if (g.s != 1.0) {
    throw Error(ErrorKind::InvalidArgument, "geometric_bound applies to s = 1; use gevrey_tail");
  }
  GeometricBound b;
  b.mrt = g.M * g.R * g.T;
  b.converges = b.mrt < 1.0;
  if (!b.converges) {
    b.bound = std::numeric_limits<double>::infinity();
    return b;
  }
  const double q = 1.0 - b.mrt;
  b.bound = g.K_alpha * resolve_KE(g) * g.K_u / (q * q);
  return b;
}

TailBound gevrey_tail(const GrowthData& g, int N) {
  check_positive(g);
  if (!(g.s >= 0.0 && g.s < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "gevrey_tail needs 0 <= s < 1");
  }
  if (N < -1) throw Error(ErrorKind::InvalidArgument, "N must be >= -1");
  const double mrt = g.M * g.R * g.T;
  const double log_mrt = mrt > 0 ? std::log(mrt) : -std::numeric_limits<double>::infinity();
  const double log_floor = std::log(1e-300);
  constexpr int kMaxTerms = 10'000'000;
  TailBound t;
  double total = 0.0;
  for (int k = N + 1; k < N + 1 + kMaxTerms; ++k) {
    double log_term = std::log(k + 1.0) + (g.s - 1.0) * std::lgamma(k + 1.0);
    if (k > 0) log_term += k * log_mrt;
    ++t.terms;
    // Once the ratio test has kicked in the terms only shrink.
    const double ratio_log = std::log((k + 2.0) / (k + 1.0)) + log_mrt + (g.s - 1.0) * std::log(k + 1.0);
    if (log_term < log_floor && ratio_log < 0) {
      t.converged = true;
      break;
    }
    total += std::exp(log_term);
  }
  t.value = g.K_alpha * resolve_KE(g) * g.K_u * total;
  return t;
}

double field_norm(const Array& f, const Grid& g, NormKind kind) {
  const Eigen::Index nt = g.time_points();
  Eigen::ArrayXd wt = Eigen::ArrayXd::Constant(nt, g.dt());
  wt(0) *= 0.5;
  wt(nt - 1) *= 0.5;
  const Eigen::ArrayXXd mag = f.abs();
  if (kind == NormKind::L1) {
    const Eigen::ArrayXd wtheta = theta_weights(g);
    return (wtheta.matrix().transpose() * mag.matrix() * wt.matrix()).value();
  }
  double volume = 1.0;
  for (const auto& ax : g.theta_axes()) volume *= ax.hi - ax.lo;
  return volume * (mag.colwise().maxCoeff().transpose() * wt).sum();
}

double sup_norm(const DiffOp& a, const Grid& g) {
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(g.theta_points());
  for (const auto& [alpha, c] : a) acc += sample_theta(c, g).abs();
  return acc.size() ? acc.maxCoeff() : 0.0;
}

namespace {

GrowthFit fit(const std::vector<double>& norms, bool with_s) {
  GrowthFit r;
  r.norms = norms;
  if (norms.empty()) throw Error(ErrorKind::InsufficientData, "no norms to fit");
  const double scale = *std::max_element(norms.begin(), norms.end());
  if (!(scale > 0) || !std::isfinite(scale)) {
    throw Error(ErrorKind::InsufficientData, "all norms vanish or are not finite");
  }
  const double floor = 1e-13 * scale;
  std::vector<int> ks;
  for (std::size_t k = 0; k < norms.size(); ++k) {
    if (std::isfinite(norms[k]) && norms[k] > floor) ks.push_back(static_cast<int>(k));
  }
  if (ks.size() == 1 && ks[0] == 0) {
    r.K = norms[0];
    r.rate = 0.0;
    r.used = 1;
    r.zero_rate = true;
    return r;
  }
  const int unknowns = with_s ? 3 : 2;
  if (static_cast<int>(ks.size()) < std::max(3, unknowns)) {
    throw Error(ErrorKind::InsufficientData,
                "need at least 3 usable norms, have " + std::to_string(ks.size()));
  }
  Eigen::MatrixXd A(static_cast<Eigen::Index>(ks.size()), unknowns);
  Eigen::VectorXd b(static_cast<Eigen::Index>(ks.size()));
  for (Eigen::Index row = 0; row < A.rows(); ++row) {
    const int k = ks[static_cast<std::size_t>(row)];
    A(row, 0) = 1.0;
    A(row, 1) = k;
    if (with_s) A(row, 2) = std::lgamma(k + 1.0);
    b(row) = std::log(norms[static_cast<std::size_t>(k)]);
  }
  const Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
  r.K = std::exp(x(0));
  r.rate = std::exp(x(1));
  r.s = with_s ? x(2) : 0.0;
  r.used = static_cast<int>(ks.size());
  r.residual = std::sqrt((A * x - b).squaredNorm() / static_cast<double>(A.rows()));
  return r;
}

}  // namespace

GrowthFit estimate_input_growth(const InputSignal& u, const Grid& g, int k_max, int theta,
                                NormKind kind) {
  if (k_max < 0) throw Error(ErrorKind::InvalidArgument, "k_max must be >= 0");
  std::vector<double> norms;
  for (int k = 0; k <= k_max; ++k) {
    norms.push_back(field_norm(u.derivative(MultiIndex::unit(g.dim(), theta, k), g), g, kind));
  }
  return fit(norms, false);
}

GrowthFit estimate_coefficient_growth(const std::vector<DiffOp>& alpha, const Grid& g) {
  std::vector<double> norms;
  for (const auto& a : alpha) norms.push_back(sup_norm(a, g));
  return fit(norms, true);
}

}  // namespace cf
