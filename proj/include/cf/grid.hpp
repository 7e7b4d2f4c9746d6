#pragma once

#include <Eigen/Core>
#include <string>
#include <string_view>
#include <vector>

#include "cf/expr.hpp"

namespace cf {

using Array = Eigen::ArrayXXcd;  // rows: flattened theta points, columns: t points
using ThetaArray = Eigen::ArrayXcd;

// n uniformly spaced points on [lo, hi].
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  Eigen::Index n = 2;

  double step() const { return (hi - lo) / static_cast<double>(n - 1); }
  double at(Eigen::Index i) const;
  Eigen::VectorXd points() const;
};

// Rectangular grid Theta x [0, T]. Theta points are flattened row-major with
// theta_1 outermost.
class Grid {
 public:
  Grid(std::vector<Axis> theta, Axis time);

  // "a:b:n,...,0:T:n_t", theta axes first, time axis last.
  static Grid parse(std::string_view spec);

  int dim() const { return static_cast<int>(theta_.size()); }
  const std::vector<Axis>& theta_axes() const { return theta_; }
  const Axis& theta_axis(int k) const { return theta_[static_cast<std::size_t>(k - 1)]; }
  const Axis& time_axis() const { return time_; }

  Eigen::Index theta_points() const { return rows_; }
  Eigen::Index time_points() const { return time_.n; }
  double dt() const { return time_.step(); }

  // Row stride of theta_k in the flattened layout.
  Eigen::Index stride(int k) const;
  // Index of theta_k at flattened row r.
  Eigen::Index index(Eigen::Index r, int k) const { return (r / stride(k)) % theta_axis(k).n; }
  std::vector<double> theta_at(Eigen::Index r) const;
  // Coordinate of theta_k at every flattened row.
  Eigen::ArrayXd theta_coordinate(int k) const;
  Eigen::ArrayXd time_coordinate() const { return time_.points().array(); }

  std::string str() const;
  friend bool operator==(const Grid& a, const Grid& b);

 private:
  std::vector<Axis> theta_;
  Axis time_;
  Eigen::Index rows_ = 1;
};

// Samples on a Grid.
class GridField {
 public:
  GridField(Grid grid, Array values);
  static GridField constant(const Grid& grid, Scalar value);

  const Grid& grid() const { return grid_; }
  const Array& values() const { return values_; }
  Array& values() { return values_; }

  Scalar operator()(Eigen::Index row, Eigen::Index col) const { return values_(row, col); }

  // Header "theta_1,...,theta_d,t,re,im"; theta outer, t inner; 17 significant digits.
  std::string to_csv() const;

 private:
  Grid grid_;
  Array values_;
};

// Expression sampled at every grid point. Throws Pole at a singular point.
Array sample(const Expr& e, const Grid& g);
// Sample of a t-independent expression at every theta point.
ThetaArray sample_theta(const Expr& e, const Grid& g);

// Cumulative composite trapezoid along each row: out(:, j) = int_0^{t_j} f dt.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> cumulative_trapezoid(
    const Eigen::ArrayBase<Derived>& f, double h) {
  using Out = Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Out out(f.rows(), f.cols());
  out.col(0).setZero();
  for (Eigen::Index j = 1; j < f.cols(); ++j) {
    out.col(j) = out.col(j - 1) + (0.5 * h) * (f.col(j - 1) + f.col(j));
  }
  return out;
}

// Second-order accurate first derivative along the rows of a 1-D line of
// samples (central inside, one-sided three-point stencils at both ends).
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> gradient_rows(
    const Eigen::ArrayBase<Derived>& f, double h) {
  using Out = Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = f.rows();
  Out out(n, f.cols());
  if (n < 3) {
    out.row(0) = (f.row(n - 1) - f.row(0)) / h;
    out.row(n - 1) = out.row(0);
    return out;
  }
  out.middleRows(1, n - 2) = (f.bottomRows(n - 2) - f.topRows(n - 2)) / (2.0 * h);
  out.row(0) = (-3.0 * f.row(0) + 4.0 * f.row(1) - f.row(2)) / (2.0 * h);
  out.row(n - 1) = (3.0 * f.row(n - 1) - 4.0 * f.row(n - 2) + f.row(n - 3)) / (2.0 * h);
  return out;
}

// d/dtheta_k of a field by gradient_rows applied along each theta_k line.
Array gradient_theta(const Array& f, const Grid& g, int k);
// Finite-difference weights for the m-th derivative at 0 from samples at the
// given offsets (Fornberg's recursion), in units of the spacing.
std::vector<double> fd_weights(int m, const std::vector<double>& offsets);
// m-th derivative (1 <= m <= 4) along the rows with second-order accuracy at
// every node: centered stencils inside, shifted m+2 point stencils near the
// ends. Needs at least m+2 rows.
Array derivative_rows(const Array& f, double h, int m);
// d^m/dtheta_k^m of a field by derivative_rows along each theta_k line.
Array derivative_theta(const Array& f, const Grid& g, int k, int m);
// d/dt by the same stencil along the columns.
Array gradient_time(const Array& f, const Grid& g);

// Tensor trapezoid weights of the theta grid, one per flattened row.
Eigen::ArrayXd theta_weights(const Grid& g);

}  // namespace cf
