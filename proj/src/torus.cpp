#include "ampcrit/torus.hpp"

#include <cmath>
#include <stdexcept>

namespace ampcrit {

TorusGrid TorusGrid::make(int dim, const std::vector<double>& lengths,
                          const std::vector<int>& points_per_axis) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("torus dimension must be 1, 2 or 3");
  if (lengths.size() != static_cast<std::size_t>(dim) ||
      points_per_axis.size() != static_cast<std::size_t>(dim))
    throw std::invalid_argument("lengths/points_per_axis must have one entry per axis");
  TorusGrid g;
  g.dim = dim;
  g.total_points = 1;
  for (int a = 0; a < dim; ++a) {
    if (!(lengths[a] > 0.0)) throw std::invalid_argument("torus lengths must be positive");
    int n = points_per_axis[a];
    if (n < 2 || n % 2 != 0)
      throw std::invalid_argument("points_per_axis must be even and at least 2");
    g.lengths[a] = lengths[a];
    g.points_per_axis[a] = n;
    g.spacing[a] = lengths[a] / n;
    g.total_points *= n;
  }
  for (int a = dim; a < 3; ++a) {
    g.lengths[a] = 0.0;
    g.points_per_axis[a] = 1;
    g.spacing[a] = 0.0;
  }
  return g;
}

double TorusGrid::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= lengths[a];
  return v;
}

double TorusGrid::cell_volume() const { return volume() / static_cast<double>(total_points); }

std::int64_t TorusGrid::flatten(const std::array<int, 3>& idx) const {
  std::int64_t f = 0;
  for (int a = 0; a < dim; ++a) f = f * points_per_axis[a] + idx[a];
  return f;
}

std::array<int, 3> TorusGrid::unflatten(std::int64_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dim - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % points_per_axis[a]);
    flat /= points_per_axis[a];
  }
  return idx;
}

Point TorusGrid::point(std::int64_t flat) const {
  auto idx = unflatten(flat);
  Point x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) x[a] = idx[a] * spacing[a];
  return x;
}

std::int64_t TorusGrid::nearest_flat(const Point& x) const {
  const Point w = wrap(x);
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < dim; ++a)
    idx[a] = static_cast<int>(std::lround(w[a] / spacing[a])) % points_per_axis[a];
  return flatten(idx);
}

Point TorusGrid::wrap(const Point& x) const {
  Point y{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) {
    double v = std::fmod(x[a], lengths[a]);
    if (v < 0.0) v += lengths[a];
    // fmod can return lengths[a] after the correction when x is a tiny negative
    if (v >= lengths[a]) v = 0.0;
    y[a] = v;
  }
  return y;
}

double TorusGrid::shortest_delta(double a, double b, int axis) const {
  const double L = lengths[axis];
  double d = std::fmod(b - a, L);
  if (d < -0.5 * L) d += L;
  if (d > 0.5 * L) d -= L;
  return d;
}

Point TorusGrid::geodesic_blend(const Point& a, const Point& b, double frac) const {
  Point r{0.0, 0.0, 0.0};
  for (int ax = 0; ax < dim; ++ax) r[ax] = a[ax] + frac * shortest_delta(a[ax], b[ax], ax);
  return wrap(r);
}

}  // namespace ampcrit
