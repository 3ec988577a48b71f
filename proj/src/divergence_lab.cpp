#include "ampcrit/divergence_lab.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ampcrit/parallel.hpp"
#include "ampcrit/rng.hpp"

namespace ampcrit {

LineFit fit_line_window(const std::vector<double>& x, const std::vector<double>& y,
                        double window_fraction) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("need at least 2 points");
  const std::size_t n = x.size();
  std::size_t w = static_cast<std::size_t>(std::ceil(window_fraction * n));
  w = std::min(n, std::max<std::size_t>(w, 2));
  const std::size_t lo = n - w;

  double sx = 0.0, sy = 0.0;
  for (std::size_t i = lo; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / w, my = sy / w;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = lo; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit window has no spread in x");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = lo; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ssr += r * r;
  }
  f.rms_residual = std::sqrt(ssr / w);
  if (w > 2) f.halfwidth = 2.0 * std::sqrt(ssr / (w - 2) / sxx);
  return f;
}

namespace {

int ladder_steps(double potential_scale, double horizon, const double per_step, int min_steps) {
  const double need = potential_scale * horizon / per_step;
  return std::max(min_steps, static_cast<int>(std::ceil(std::max(need, 1.0))));
}

}  // namespace

SlopeFit growth_slope(const FieldModel& model, ComplexMass mass, double lambda,
                      const Direction& sigma, const std::vector<double>& radii, const Point& probe,
                      double horizon, const LadderOptions& opts) {
  if (radii.size() < 2) throw std::invalid_argument("radius ladder needs at least 2 rungs");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw std::invalid_argument("radii must be strictly increasing");

  const std::int64_t probe_flat = model.grid.nearest_flat(probe);
  SlopeFit fit;
  fit.radii = radii;
  fit.log_moduli.resize(radii.size());

  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double r = radii[i];
    // |S|^2 <= ||s||^2 sum A_n^2 = r^2 for a normalized model
    const int steps = ladder_steps(lambda * r * r, horizon, opts.potential_per_step, opts.min_steps);
    const GaussianDraw draw = GaussianDraw::from_amplitudes(r * sigma.sigma);
    const EvolvedField f = solve_amplifier(model, draw, mass, lambda, horizon, horizon / steps);
    fit.log_moduli[i] = f.log_abs_at(probe_flat);
  }

  std::vector<double> r2(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) r2[i] = radii[i] * radii[i];

  std::vector<double> y = fit.log_moduli;
  if (opts.envelope) {
    for (std::size_t i = 0; i < y.size(); ++i) {
      double m = fit.log_moduli[i];
      if (i > 0) m = std::max(m, fit.log_moduli[i - 1]);
      if (i + 1 < y.size()) m = std::max(m, fit.log_moduli[i + 1]);
      y[i] = m;
    }
  }
  const LineFit lf = fit_line_window(r2, y, opts.window_fraction);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.confidence_halfwidth = lf.halfwidth;
  const double rise = std::abs(lf.slope) * (r2.back() - r2.front()) + 1e-12;
  fit.flagged = lf.rms_residual > opts.residual_threshold * rise;
  return fit;
}

PaleyWienerReport paley_wiener_check(const FieldModel& model, ComplexMass mass,
                                     const TimeGrid& tgrid, int axis,
                                     const std::vector<double>& rho_list, const Point& probe,
                                     const PaleyWienerOptions& opts) {
  const int N = monomial_count(model.mode_count);
  if (axis < 0 || axis >= N) throw std::out_of_range("monomial axis out of range");
  if (rho_list.size() < 2) throw std::invalid_argument("rho ladder needs at least 2 rungs");
  for (std::size_t i = 1; i < rho_list.size(); ++i)
    if (!(rho_list[i] > rho_list[i - 1]))
      throw std::invalid_argument("rho ladder must be increasing");

  // Single-axis support bounds and centering.
  const SpaceTimeFn up = [&](const Point& x, double tau) { return monomial_at(model, axis, x, tau); };
  const SpaceTimeFn dn = [&](const Point& x, double tau) { return -monomial_at(model, axis, x, tau); };
  PaleyWienerReport rep;
  rep.axis = axis;
  rep.b = sup_time_integral(up, model.grid, tgrid).value;
  rep.a = -sup_time_integral(dn, model.grid, tgrid).value;
  rep.kappa = 0.5 * (rep.b - rep.a);
  const double c_j = -(rep.a + rep.b) / (2.0 * tgrid.horizon);
  Eigen::VectorXd centering = Eigen::VectorXd::Zero(N);
  centering(axis) = c_j;

  const MonomialIndex mi = monomial_index(model.mode_count, axis);
  const double phimax = mi.kind == 0 ? model.amplitudes(mi.n) * model.amplitudes(mi.n)
                                     : M_SQRT2 * model.amplitudes(mi.n) * model.amplitudes(mi.m);

  const std::int64_t probe_flat = model.grid.nearest_flat(probe);
  const std::size_t R = rho_list.size();
  rep.rho = rho_list;
  rep.log_mod_plus.resize(R);
  rep.log_mod_minus.resize(R);
  rep.centered_plus.resize(R);
  rep.centered_minus.resize(R);

  for (std::size_t i = 0; i < R; ++i) {
    const double rho = rho_list[i];
    const int steps =
        ladder_steps(rho * (phimax + std::abs(c_j)), tgrid.horizon, opts.potential_per_step,
                     opts.min_steps);
    const double dt = tgrid.horizon / steps;
    Eigen::VectorXcd eta = Eigen::VectorXcd::Zero(N);
    eta(axis) = Complex(0.0, rho);
    rep.log_mod_plus[i] = solve_eta(model, eta, mass, tgrid.horizon, dt).log_abs_at(probe_flat);
    rep.centered_plus[i] =
        solve_eta(model, eta, mass, tgrid.horizon, dt, &centering).log_abs_at(probe_flat);
    eta(axis) = Complex(0.0, -rho);
    rep.log_mod_minus[i] = solve_eta(model, eta, mass, tgrid.horizon, dt).log_abs_at(probe_flat);
    rep.centered_minus[i] =
        solve_eta(model, eta, mass, tgrid.horizon, dt, &centering).log_abs_at(probe_flat);
  }

  rep.slope_plus = fit_line_window(rho_list, rep.log_mod_plus, opts.window_fraction).slope;
  rep.slope_minus = fit_line_window(rho_list, rep.log_mod_minus, opts.window_fraction).slope;
  rep.centered_slope_plus = fit_line_window(rho_list, rep.centered_plus, opts.window_fraction).slope;
  rep.centered_slope_minus =
      fit_line_window(rho_list, rep.centered_minus, opts.window_fraction).slope;

  if (rep.centered_slope_plus > rep.kappa + opts.bound_tol ||
      rep.centered_slope_minus > rep.kappa + opts.bound_tol)
    throw std::runtime_error("centered growth slope violates the Paley-Wiener bound on axis " +
                             std::to_string(axis));
  return rep;
}

FreeMoment closed_form_free_moment(const Eigen::VectorXd& eigenvalues, int q, double lambda) {
  if (q < 1) throw std::invalid_argument("q must be a positive integer");
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
    if (eigenvalues(i) < -1e-12) throw std::invalid_argument("covariance eigenvalues must be >= 0");
  FreeMoment m;
  double top = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) top = std::max(top, eigenvalues(i));
  if (lambda > 0.0 && q * lambda * top >= 1.0) {
    m.finite = false;
    m.value = std::numeric_limits<double>::infinity();
    return m;
  }
  m.finite = true;
  m.value = 1.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
    m.value /= 1.0 - q * lambda * std::max(eigenvalues(i), 0.0);
  return m;
}

namespace {

MomentEstimate mc_moment_with_mu(const FieldModel& model, ComplexMass mass, double lambda, int q,
                                 const Point& x, const TimeGrid& tgrid, std::int64_t n_samples,
                                 std::uint64_t stream_seed, double mu_hat, const McOptions& opts) {
  MomentEstimate est;
  est.q = q;
  est.lambda = lambda;
  est.mu_hat = mu_hat;
  est.finite_flag = q * lambda * mu_hat < 1.0;
  if (!est.finite_flag) {
    est.mean = std::numeric_limits<double>::quiet_NaN();
    est.std_error = std::numeric_limits<double>::quiet_NaN();
    return est;
  }
  if (n_samples < 1) throw std::invalid_argument("need at least one sample");
  est.samples = n_samples;

  std::vector<double> qlog(static_cast<std::size_t>(n_samples));
  const std::int64_t probe_flat = model.grid.nearest_flat(x);

  if (mass.infinite) {
    // int |S(x,tau)|^2 dtau = s^dag Gamma s with the same midpoint quadrature
    // the dedicated solver path uses, so no PDE solve is needed per sample.
    const Eigen::MatrixXcd G = integrated_gamma(model, x, tgrid).entries;
    parallel_chunks(n_samples, opts.threads, [&](std::int64_t b, std::int64_t e) {
      for (std::int64_t i = b; i < e; ++i) {
        const GaussianDraw d = sample_gaussian(model, stream_seed, static_cast<std::uint64_t>(i));
        const double v = std::real(d.s.dot(G * d.s));
        qlog[static_cast<std::size_t>(i)] = q * lambda * v;
      }
    });
  } else {
    const int base_steps = opts.solver_min_steps > 0 ? opts.solver_min_steps : tgrid.slices;
    parallel_chunks(n_samples, opts.threads, [&](std::int64_t b, std::int64_t e) {
      for (std::int64_t i = b; i < e; ++i) {
        const GaussianDraw d = sample_gaussian(model, stream_seed, static_cast<std::uint64_t>(i));
        const int steps = ladder_steps(lambda * d.norm_s * d.norm_s, tgrid.horizon,
                                       opts.potential_per_step, base_steps);
        const EvolvedField f =
            solve_amplifier(model, d, mass, lambda, tgrid.horizon, tgrid.horizon / steps);
        qlog[static_cast<std::size_t>(i)] = q * f.log_abs_at(probe_flat);
      }
    });
  }

  double logmax = qlog[0];
  for (double v : qlog) logmax = std::max(logmax, v);
  std::vector<double> w(qlog.size());
  for (std::size_t i = 0; i < qlog.size(); ++i) w[i] = std::exp(qlog[i] - logmax);
  const double wsum = pairwise_sum(w.data(), static_cast<std::int64_t>(w.size()));
  const double wbar = wsum / static_cast<double>(n_samples);
  est.mean = std::exp(logmax) * wbar;
  if (n_samples > 1) {
    std::vector<double> dev(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) dev[i] = (w[i] - wbar) * (w[i] - wbar);
    const double ss = pairwise_sum(dev.data(), static_cast<std::int64_t>(dev.size()));
    est.std_error = std::exp(logmax) *
                    std::sqrt(ss / static_cast<double>(n_samples - 1) /
                              static_cast<double>(n_samples));
  }
  return est;
}

}  // namespace

MomentEstimate mc_moment(const FieldModel& model, ComplexMass mass, double lambda, int q,
                         const Point& x, const TimeGrid& tgrid, std::int64_t n_samples,
                         std::uint64_t stream_seed, const McOptions& opts) {
  if (q < 1) throw std::invalid_argument("q must be a positive integer");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
  double mu_hat;
  if (mass.infinite) {
    mu_hat = integrated_gamma(model, x, tgrid).eigenvalues_descending()(0);
  } else {
    MuOptions mo = opts.mu;
    mo.anchor = x;
    mu_hat = mu_alternating(model, tgrid, mo).mu;
  }
  return mc_moment_with_mu(model, mass, lambda, q, x, tgrid, n_samples, stream_seed, mu_hat, opts);
}

ScanResult lambda_scan(const FieldModel& model, ComplexMass mass, int q,
                       const std::vector<double>& lambda_grid, const Point& x,
                       const TimeGrid& tgrid, const ScanOptions& opts) {
  if (q < 1) throw std::invalid_argument("q must be a positive integer");
  ScanResult out;
  out.mu1_const = integrated_gamma(model, x, tgrid).eigenvalues_descending()(0);
  MuOptions mo = opts.mc.mu;
  mo.anchor = x;
  out.mu_xt = mu_alternating(model, tgrid, mo).mu;
  const double mu_hat = mass.infinite ? out.mu1_const : out.mu_xt;

  out.rows.reserve(lambda_grid.size());
  for (std::size_t r = 0; r < lambda_grid.size(); ++r) {
    const double lambda = lambda_grid[r];
    if (!(lambda >= 0.0)) throw std::invalid_argument("lambda grid must be nonnegative");
    ScanRow row;
    row.lambda = lambda;
    row.qlmu = q * lambda * out.mu_xt;
    row.divergent_prop = row.qlmu >= 1.0;
    row.divergent_free = q * lambda * out.mu1_const >= 1.0;
    if (opts.mc_samples > 0 && q * lambda * mu_hat <= opts.mc_threshold) {
      row.mc = mc_moment_with_mu(model, mass, lambda, q, x, tgrid, opts.mc_samples,
                                 rng::substream(opts.stream_seed, 100 + r), mu_hat, opts.mc);
      row.has_mc = true;
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace ampcrit
