#include "cf/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "cf/error.hpp"

namespace cf {

namespace {

double parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::Parse, "bad number '" + std::string(s) + "' in grid");
  }
  return v;
}

Axis parse_axis(std::string_view s) {
  auto a = s.find(':');
  auto b = a == s.npos ? s.npos : s.find(':', a + 1);
  if (b == s.npos) throw Error(ErrorKind::Parse, "grid axis must be a:b:n, got '" + std::string(s) + "'");
  Axis ax;
  ax.lo = parse_double(s.substr(0, a));
  ax.hi = parse_double(s.substr(a + 1, b - a - 1));
  double n = parse_double(s.substr(b + 1));
  if (n != std::floor(n)) throw Error(ErrorKind::Parse, "grid point count must be an integer");
  ax.n = static_cast<Eigen::Index>(n);
  return ax;
}

void check_axis(const Axis& ax, std::string_view name) {
  if (ax.n < 2) {
    throw Error(ErrorKind::InvalidArgument, std::string(name) + " axis needs at least 2 points");
  }
  if (!(ax.hi > ax.lo) || !std::isfinite(ax.lo) || !std::isfinite(ax.hi)) {
    throw Error(ErrorKind::InvalidArgument, std::string(name) + " axis needs lo < hi");
  }
}

std::string fmt17(double v) {
  char buf[40];
  auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

Array int_power(const Array& base, std::int64_t k) {
  if (k < 0) {
    if ((base == Scalar(0.0)).any()) throw Error(ErrorKind::Pole, "zero raised to a negative power");
    return int_power(base.inverse(), -k);
  }
  Array result = Array::Ones(base.rows(), base.cols());
  Array b = base;
  while (k > 0) {
    if (k & 1) result *= b;
    k >>= 1;
    if (k) b *= b;
  }
  return result;
}

// Node-wise evaluation on whole arrays. rows x cols is either the full grid or
// rows x 1 for t-free subexpressions.
Array sample_node(const Expr& e, const Grid& g, bool with_t) {
  const Eigen::Index rows = g.theta_points();
  const Eigen::Index cols = with_t ? g.time_points() : 1;
  if (with_t && !e.depends_on(Variable::time())) {
    Array column = sample_node(e, g, false);
    return column.replicate(1, cols);
  }
  switch (e.op()) {
    case ExprOp::Const:
      return Array::Constant(rows, cols, e.value());
    case ExprOp::Var: {
      Variable v = e.variable();
      if (v.is_time()) {
        Eigen::ArrayXd t = g.time_coordinate();
        return t.transpose().cast<Scalar>().replicate(rows, 1);
      }
      if (v.index() > g.dim()) {
        throw Error(ErrorKind::DimensionMismatch,
                    v.name() + " is outside the " + std::to_string(g.dim()) + "-parameter grid");
      }
      return g.theta_coordinate(v.index()).cast<Scalar>().replicate(1, cols);
    }
    case ExprOp::Add: {
      Array acc = Array::Zero(rows, cols);
      for (const auto& a : e.args()) acc += sample_node(a, g, with_t);
      return acc;
    }
    case ExprOp::Mul: {
      Array acc = Array::Ones(rows, cols);
      for (const auto& a : e.args()) acc *= sample_node(a, g, with_t);
      return acc;
    }
    case ExprOp::Pow:
      return int_power(sample_node(e.args()[0], g, with_t), e.exponent());
    case ExprOp::Sin:
      return sample_node(e.args()[0], g, with_t).unaryExpr([](Scalar z) {
        return z.imag() == 0.0 ? Scalar(std::sin(z.real())) : std::sin(z);
      });
    case ExprOp::Cos:
      return sample_node(e.args()[0], g, with_t).unaryExpr([](Scalar z) {
        return z.imag() == 0.0 ? Scalar(std::cos(z.real())) : std::cos(z);
      });
    case ExprOp::Exp:
      return sample_node(e.args()[0], g, with_t).unaryExpr([](Scalar z) {
        return z.imag() == 0.0 ? Scalar(std::exp(z.real())) : std::exp(z);
      });
  }
  throw Error(ErrorKind::InvalidArgument, "unknown expression node");
}

}  // namespace

double Axis::at(Eigen::Index i) const {
  if (i == n - 1) return hi;
  return lo + static_cast<double>(i) * step();
}

Eigen::VectorXd Axis::points() const {
  Eigen::VectorXd p(n);
  for (Eigen::Index i = 0; i < n; ++i) p(i) = at(i);
  return p;
}

Grid::Grid(std::vector<Axis> theta, Axis time) : theta_(std::move(theta)), time_(time) {
  if (theta_.empty()) throw Error(ErrorKind::InvalidArgument, "grid needs at least one theta axis");
  for (const auto& ax : theta_) check_axis(ax, "theta");
  check_axis(time_, "time");
  if (time_.lo != 0.0) throw Error(ErrorKind::InvalidArgument, "time axis must start at t = 0");
  for (const auto& ax : theta_) rows_ *= ax.n;
}

Grid Grid::parse(std::string_view spec) {
  std::vector<Axis> axes;
  std::size_t start = 0;
  for (;;) {
    auto p = spec.find(',', start);
    axes.push_back(parse_axis(spec.substr(start, p == spec.npos ? spec.npos : p - start)));
    if (p == spec.npos) break;
    start = p + 1;
  }
  if (axes.size() < 2) throw Error(ErrorKind::Parse, "grid needs theta axes and a time axis");
  Axis time = axes.back();
  axes.pop_back();
  return Grid(std::move(axes), time);
}

Eigen::Index Grid::stride(int k) const {
  Eigen::Index s = 1;
  for (int j = dim(); j > k; --j) s *= theta_axis(j).n;
  return s;
}

std::vector<double> Grid::theta_at(Eigen::Index r) const {
  std::vector<double> p(theta_.size());
  for (int k = 1; k <= dim(); ++k) p[static_cast<std::size_t>(k - 1)] = theta_axis(k).at(index(r, k));
  return p;
}

Eigen::ArrayXd Grid::theta_coordinate(int k) const {
  Eigen::ArrayXd c(rows_);
  const Axis& ax = theta_axis(k);
  for (Eigen::Index r = 0; r < rows_; ++r) c(r) = ax.at(index(r, k));
  return c;
}

std::string Grid::str() const {
  std::string s;
  auto axis = [](const Axis& a) { return fmt17(a.lo) + ":" + fmt17(a.hi) + ":" + std::to_string(a.n); };
  for (const auto& a : theta_) s += axis(a) + ",";
  return s + axis(time_);
}

bool operator==(const Grid& a, const Grid& b) {
  auto same = [](const Axis& x, const Axis& y) { return x.lo == y.lo && x.hi == y.hi && x.n == y.n; };
  if (a.dim() != b.dim() || !same(a.time_, b.time_)) return false;
  for (std::size_t i = 0; i < a.theta_.size(); ++i) {
    if (!same(a.theta_[i], b.theta_[i])) return false;
  }
  return true;
}

GridField::GridField(Grid grid, Array values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.rows() != grid_.theta_points() || values_.cols() != grid_.time_points()) {
    throw Error(ErrorKind::DimensionMismatch, "field shape does not match grid");
  }
}

GridField GridField::constant(const Grid& grid, Scalar value) {
  return GridField(grid, Array::Constant(grid.theta_points(), grid.time_points(), value));
}

std::string GridField::to_csv() const {
  std::string s;
  for (int k = 1; k <= grid_.dim(); ++k) s += "theta_" + std::to_string(k) + ",";
  s += "t,re,im\n";
  const Eigen::VectorXd t = grid_.time_axis().points();
  for (Eigen::Index r = 0; r < values_.rows(); ++r) {
    std::string prefix;
    for (double th : grid_.theta_at(r)) prefix += fmt17(th) + ",";
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
      const Scalar v = values_(r, j);
      s += prefix + fmt17(t(j)) + "," + fmt17(v.real()) + "," + fmt17(v.imag()) + "\n";
    }
  }
  return s;
}

Array sample(const Expr& e, const Grid& g) { return sample_node(e, g, true); }

ThetaArray sample_theta(const Expr& e, const Grid& g) {
  if (e.depends_on(Variable::time())) {
    throw Error(ErrorKind::InvalidArgument, "expected a t-independent expression");
  }
  return sample_node(e, g, false).col(0);
}

Array gradient_theta(const Array& f, const Grid& g, int k) {
  const Axis& ax = g.theta_axis(k);
  const Eigen::Index n = ax.n;
  const Eigen::Index s = g.stride(k);
  Array out(f.rows(), f.cols());
  Array line(n, f.cols());
  // Each theta_k line starts at a row whose theta_k index is zero.
  for (Eigen::Index r0 = 0; r0 < f.rows(); ++r0) {
    if (g.index(r0, k) != 0) continue;
    for (Eigen::Index i = 0; i < n; ++i) line.row(i) = f.row(r0 + i * s);
    Array d = gradient_rows(line, ax.step());
    for (Eigen::Index i = 0; i < n; ++i) out.row(r0 + i * s) = d.row(i);
  }
  return out;
}

std::vector<double> fd_weights(int m, const std::vector<double>& x) {
  const std::size_t n = x.size();
  const auto M = static_cast<std::size_t>(m);
  std::vector<std::vector<double>> c(n, std::vector<double>(M + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0];
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min(i, M);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i];
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k) {
          c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k) {
        c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
      }
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = c[j][M];
  return w;
}

Array derivative_rows(const Array& f, double h, int m) {
  if (m < 1 || m > 4) throw Error(ErrorKind::DerivativeOrder, "stencil order must be 1..4");
  const Eigen::Index n = f.rows();
  const Eigen::Index len = m + 2;
  if (n < len) {
    throw Error(ErrorKind::InvalidArgument, "derivative of order " + std::to_string(m) +
                                                " needs " + std::to_string(len) + " points");
  }
  const Eigen::Index half = (m + 1) / 2;
  const double scale = std::pow(h, -m);
  Array out(n, f.cols());
  auto apply_stencil = [&](Eigen::Index i, Eigen::Index start, Eigen::Index width) {
    std::vector<double> offs(static_cast<std::size_t>(width));
    for (Eigen::Index j = 0; j < width; ++j) offs[static_cast<std::size_t>(j)] = double(start + j - i);
    const std::vector<double> w = fd_weights(m, offs);
    out.row(i).setZero();
    for (Eigen::Index j = 0; j < width; ++j) {
      out.row(i) += (w[static_cast<std::size_t>(j)] * scale) * f.row(start + j);
    }
  };
  // Interior rows share one centered stencil.
  if (n - 2 * half > 0) {
    std::vector<double> offs;
    for (Eigen::Index j = -half; j <= half; ++j) offs.push_back(double(j));
    const std::vector<double> w = fd_weights(m, offs);
    out.middleRows(half, n - 2 * half).setZero();
    for (Eigen::Index j = 0; j <= 2 * half; ++j) {
      out.middleRows(half, n - 2 * half) +=
          (w[static_cast<std::size_t>(j)] * scale) * f.middleRows(j, n - 2 * half);
    }
  }
  for (Eigen::Index i = 0; i < std::min(half, n); ++i) apply_stencil(i, 0, len);
  for (Eigen::Index i = std::max(half, n - half); i < n; ++i) apply_stencil(i, n - len, len);
  return out;
}

Array derivative_theta(const Array& f, const Grid& g, int k, int m) {
  const Axis& ax = g.theta_axis(k);
  const Eigen::Index n = ax.n;
  const Eigen::Index s = g.stride(k);
  Array out(f.rows(), f.cols());
  Array line(n, f.cols());
  for (Eigen::Index r0 = 0; r0 < f.rows(); ++r0) {
    if (g.index(r0, k) != 0) continue;
    for (Eigen::Index i = 0; i < n; ++i) line.row(i) = f.row(r0 + i * s);
    Array d = derivative_rows(line, ax.step(), m);
    for (Eigen::Index i = 0; i < n; ++i) out.row(r0 + i * s) = d.row(i);
  }
  return out;
}

Array gradient_time(const Array& f, const Grid& g) {
  return gradient_rows(f.transpose(), g.dt()).transpose();
}

Eigen::ArrayXd theta_weights(const Grid& g) {
  Eigen::ArrayXd w = Eigen::ArrayXd::Ones(g.theta_points());
  for (int k = 1; k <= g.dim(); ++k) {
    const Axis& ax = g.theta_axis(k);
    for (Eigen::Index r = 0; r < w.size(); ++r) {
      const Eigen::Index i = g.index(r, k);
      w(r) *= (i == 0 || i == ax.n - 1) ? 0.5 * ax.step() : ax.step();
    }
  }
  return w;
}

}  // namespace cf
