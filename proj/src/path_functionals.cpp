#include "ampcrit/path_functionals.hpp"

#include <cmath>
#include <stdexcept>

namespace ampcrit {

TimeGrid TimeGrid::make(double horizon, int slices) {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (slices < 1) throw std::invalid_argument("time grid needs at least one slice");
  return TimeGrid{horizon, slices};
}

Point DiscretePath::at(double tau) const {
  const int n = tgrid.slices;
  const double dt = tgrid.dt();
  if (tau <= 0.0) return points.front();
  if (tau >= tgrid.horizon) return points.back();
  const int j = std::min(static_cast<int>(tau / dt), n - 1);
  const double frac = (tau - j * dt) / dt;
  return grid.geodesic_blend(points[static_cast<std::size_t>(j)],
                             points[static_cast<std::size_t>(j) + 1], frac);
}

SliceMax polish_argmax(const TorusGrid& grid, std::int64_t best_flat, double best_val,
                       const std::function<double(const Point&)>& Wx) {
  SliceMax out;
  out.argmax = grid.point(best_flat);
  out.value = best_val;

  // One parabolic polish per axis around the grid argmax.
  const auto idx = grid.unflatten(best_flat);
  Point cand = out.argmax;
  for (int a = 0; a < grid.dim; ++a) {
    const int n = grid.points_per_axis[a];
    auto neighbor = [&](int off) {
      auto id2 = idx;
      id2[a] = (idx[a] + off + n) % n;
      return Wx(grid.point(grid.flatten(id2)));
    };
    const double wm = neighbor(-1);
    const double wp = neighbor(+1);
    const double denom = wm - 2.0 * best_val + wp;
    if (denom < 0.0) {
      double delta = 0.5 * (wm - wp) / denom * grid.spacing[a];
      delta = std::clamp(delta, -grid.spacing[a], grid.spacing[a]);
      cand[a] += delta;
    }
  }
  cand = grid.wrap(cand);
  const double cv = Wx(cand);
  if (cv > best_val) {
    out.polish_gain = cv - best_val;
    out.value = cv;
    out.argmax = cand;
  }
  return out;
}

SliceMax maximize_slice(const TorusGrid& grid, const SpaceTimeFn& W, double tau, bool refine) {
  // Grid scan; ties within 1e-12 (scaled) keep the lowest flattened index.
  std::int64_t best = 0;
  double best_val = W(grid.point(0), tau);
  for (std::int64_t f = 1; f < grid.total_points; ++f) {
    const double v = W(grid.point(f), tau);
    if (v > best_val + 1e-12 * (1.0 + std::abs(best_val))) {
      best_val = v;
      best = f;
    }
  }
  if (!refine) {
    SliceMax out;
    out.argmax = grid.point(best);
    out.value = best_val;
    return out;
  }
  return polish_argmax(grid, best, best_val, [&](const Point& x) { return W(x, tau); });
}

SupIntegral sup_time_integral(const SpaceTimeFn& W, const TorusGrid& grid, const TimeGrid& tgrid,
                              bool refine) {
  SupIntegral out;
  out.maximizers.resize(static_cast<std::size_t>(tgrid.slices));
  out.slice_values.resize(static_cast<std::size_t>(tgrid.slices));
  const double dt = tgrid.dt();
  double polish_total = 0.0;
  for (int j = 0; j < tgrid.slices; ++j) {
    const SliceMax sm = maximize_slice(grid, W, tgrid.midpoint(j), refine);
    out.maximizers[static_cast<std::size_t>(j)] = sm.argmax;
    out.slice_values[static_cast<std::size_t>(j)] = sm.value;
    out.value += sm.value * dt;
    polish_total += sm.polish_gain * dt;
  }
  // Midpoint-vs-trapezoid discrepancy as the O(dt^2) part, residual polish
  // size as the O(h^2) part; both reported, not silently absorbed.
  double trap = 0.0;
  for (int j = 0; j <= tgrid.slices; ++j) {
    const SliceMax sm = maximize_slice(grid, W, tgrid.node(j), refine);
    trap += sm.value * ((j == 0 || j == tgrid.slices) ? 0.5 : 1.0) * dt;
  }
  out.error_estimate = std::abs(out.value - trap) / 3.0 + 0.5 * polish_total;
  return out;
}

PathBounds bounds_and_centering(const FieldModel& model, const TimeGrid& tgrid) {
  const int N = monomial_count(model.mode_count);
  PathBounds pb;
  pb.a.resize(N);
  pb.b.resize(N);
  pb.c.resize(N);
  pb.kappa.resize(N);
  for (int i = 0; i < N; ++i) {
    const SpaceTimeFn up = [&, i](const Point& x, double tau) { return monomial_at(model, i, x, tau); };
    const SpaceTimeFn dn = [&, i](const Point& x, double tau) { return -monomial_at(model, i, x, tau); };
    pb.b(i) = sup_time_integral(up, model.grid, tgrid).value;
    pb.a(i) = -sup_time_integral(dn, model.grid, tgrid).value;
    pb.c(i) = -(pb.a(i) + pb.b(i)) / (2.0 * tgrid.horizon);
    pb.kappa(i) = 0.5 * (pb.b(i) - pb.a(i));
  }
  return pb;
}

DiscretePath construct_epsilon_path(const std::vector<Point>& per_slice_maximizers,
                                    const Point& x_end, const TorusGrid& grid,
                                    const TimeGrid& tgrid, double transit_fraction) {
  const int n = tgrid.slices;
  if (per_slice_maximizers.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("need one maximizer per slice");
  double f = transit_fraction;
  if (f <= 0.0) f = 1.0 / (2.0 * n);
  if (f > 0.5) throw std::invalid_argument("transit_fraction must lie in (0, 1/2]");

  // Fine uniform grid; the window half-width snaps to a whole number of fine
  // steps so dwell and transit zones land exactly on nodes.
  const int refine = std::max(2, static_cast<int>(std::ceil(1.0 / f)));
  const int wsteps = std::max(1, std::min(refine / 2, static_cast<int>(std::lround(f * refine))));
  const double dt = tgrid.dt();
  const double h = dt / refine;
  const double w = wsteps * h;

  DiscretePath path;
  path.tgrid = TimeGrid::make(tgrid.horizon, n * refine);
  path.grid = grid;
  path.points.resize(static_cast<std::size_t>(n) * refine + 1);

  const auto& mx = per_slice_maximizers;
  for (int k = 0; k <= n * refine; ++k) {
    const double tau = k * h;
    Point p;
    if (tau >= tgrid.horizon - w) {
      // final window: leave the last maximizer for the requested endpoint
      const double frac = (tau - (tgrid.horizon - w)) / w;
      p = grid.geodesic_blend(mx[static_cast<std::size_t>(n - 1)], x_end, frac);
    } else {
      int q = std::min(static_cast<int>(tau / dt), n - 1);
      const double b_next = (q + 1) * dt;
      const double b_prev = q * dt;
      if (q < n - 1 && tau >= b_next - w) {
        const double frac = (tau - (b_next - w)) / (2.0 * w);
        p = grid.geodesic_blend(mx[static_cast<std::size_t>(q)],
                                mx[static_cast<std::size_t>(q) + 1], frac);
      } else if (q > 0 && tau <= b_prev + w) {
        const double frac = (tau - (b_prev - w)) / (2.0 * w);
        p = grid.geodesic_blend(mx[static_cast<std::size_t>(q) - 1],
                                mx[static_cast<std::size_t>(q)], frac);
      } else {
        p = mx[static_cast<std::size_t>(q)];
      }
    }
    path.points[static_cast<std::size_t>(k)] = p;
  }
  path.points.back() = grid.wrap(x_end);
  return path;
}

double path_time_integral(const SpaceTimeFn& W, const DiscretePath& path, int n_sub) {
  if (n_sub < 1) throw std::invalid_argument("n_sub must be at least 1");
  const double dt = path.tgrid.dt() / n_sub;
  const int total = path.tgrid.slices * n_sub;
  double acc = 0.0;
  for (int k = 0; k < total; ++k) {
    const double tau = (k + 0.5) * dt;
    acc += W(path.at(tau), tau) * dt;
  }
  return acc;
}

}  // namespace ampcrit
