#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace ampcrit {

// A point on the torus. Components beyond the active dimension are zero.
using Point = std::array<double, 3>;

// Flat periodic box [0,L0) x [0,L1) x [0,L2) with a uniform grid.
// points_per_axis must be even so the spectral truncation is symmetric.
struct TorusGrid {
  int dim = 1;
  std::array<double, 3> lengths{};
  std::array<int, 3> points_per_axis{};
  std::array<double, 3> spacing{};
  std::int64_t total_points = 0;

  static TorusGrid make(int dim, const std::vector<double>& lengths,
                        const std::vector<int>& points_per_axis);

  double volume() const;
  double cell_volume() const;

  std::int64_t flatten(const std::array<int, 3>& idx) const;
  std::array<int, 3> unflatten(std::int64_t flat) const;
  Point point(std::int64_t flat) const;
  std::int64_t nearest_flat(const Point& x) const;

  // Wrap a coordinate vector into the fundamental domain.
  Point wrap(const Point& x) const;
  // Signed shortest displacement from a to b along one axis (torus geodesic).
  double shortest_delta(double a, double b, int axis) const;
  // Point a fraction frac of the way along the geodesic from a to b.
  Point geodesic_blend(const Point& a, const Point& b, double frac) const;
};

}  // namespace ampcrit
