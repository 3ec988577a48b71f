#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "ampcrit/field_model.hpp"
#include "ampcrit/torus.hpp"

namespace ampcrit {

// Uniform partition of [0, horizon] into `slices` intervals.
struct TimeGrid {
  double horizon = 1.0;
  int slices = 1;

  static TimeGrid make(double horizon, int slices);
  double dt() const { return horizon / slices; }
  double node(int j) const { return j * dt(); }
  double midpoint(int j) const { return (j + 0.5) * dt(); }
};

// Piecewise-geodesic continuous path sampled on a uniform time grid; the
// terminal point is the endpoint constraint x(t) = x_end.
struct DiscretePath {
  TimeGrid tgrid;
  TorusGrid grid;  // provides wrap metric for interpolation
  std::vector<Point> points;  // slices + 1 nodes

  Point at(double tau) const;
  const Point& endpoint() const { return points.back(); }
};

using SpaceTimeFn = std::function<double(const Point&, double)>;

// Per-slice spatial maximum: grid argmax (ties within 1e-12 broken toward the
// lowest flattened index) followed by one parabolic polish along each axis.
struct SliceMax {
  double value = 0.0;
  Point argmax{0.0, 0.0, 0.0};
  double polish_gain = 0.0;  // value - best grid value
};
SliceMax maximize_slice(const TorusGrid& grid, const SpaceTimeFn& W, double tau, bool refine);

// The polish step alone, given a grid argmax found elsewhere.
SliceMax polish_argmax(const TorusGrid& grid, std::int64_t best_flat, double best_val,
                       const std::function<double(const Point&)>& Wx);

// int_0^t sup_x W(x,tau) dtau by composite midpoint over tgrid.
struct SupIntegral {
  double value = 0.0;
  double error_estimate = 0.0;
  std::vector<Point> maximizers;     // per slice, at midpoint times
  std::vector<double> slice_values;  // sup_x W(x, midpoint_j)
};
SupIntegral sup_time_integral(const SpaceTimeFn& W, const TorusGrid& grid, const TimeGrid& tgrid,
                              bool refine = true);

// Support bounds and centering constants of the monomials:
//   a_i = int inf phi_i, b_i = int sup phi_i,
//   c_i = -(a_i + b_i) / (2 t),  kappa_i = (b_i - a_i) / 2.
struct PathBounds {
  Eigen::VectorXd a, b, c, kappa;
};
PathBounds bounds_and_centering(const FieldModel& model, const TimeGrid& tgrid);

// Dwell-and-transit path through the per-slice maximizers, ending at x_end.
// The path dwells at each maximizer and crosses between consecutive ones on
// geodesics inside windows of half-width transit_fraction * dt around the
// slice boundaries; transit_fraction <= 0 selects the default 1/(2 slices).
DiscretePath construct_epsilon_path(const std::vector<Point>& per_slice_maximizers,
                                    const Point& x_end, const TorusGrid& grid,
                                    const TimeGrid& tgrid, double transit_fraction = 0.0);

// Midpoint quadrature of W along the path on its own grid, each slice split
// into n_sub subintervals.
double path_time_integral(const SpaceTimeFn& W, const DiscretePath& path, int n_sub = 1);

}  // namespace ampcrit
