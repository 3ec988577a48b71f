//==============================================================================
// Split-step spectral propagation on the torus.
//
// Both equations share the free part (i/2m) Lap:
//   amplifier:  d_t E   = (i/2m) Lap E   + lambda |S(x,t)|^2 E
//   auxiliary:  i d_t P = -(1/2m) Lap P  + V(x,t) P,  V = sum_i eta_i phi_i
// One step of size dt is  F(dt/2) * exp(potential at midpoint * dt) * F(dt/2),
// where F is diagonal in Fourier space with multiplier exp(-i |k|^2 dt / (4m))
// per half step. |multiplier| <= 1 whenever Im(m) >= 0, so the scheme is
// unconditionally stable; the growth of the field itself is absorbed into a
// running log_scale so no intermediate ever leaves double range.
// The infinite-mass limit skips the free steps entirely, which makes the
// result the midpoint-quadrature exponential of the accumulated potential.
//==============================================================================

#include "ampcrit/solver.hpp"

#include <cmath>
#include <stdexcept>

#include "ampcrit/fft.hpp"

namespace ampcrit {

ComplexMass ComplexMass::finite(Complex m) {
  if (m == Complex(0.0, 0.0)) throw std::invalid_argument("complex mass must be nonzero");
  if (m.imag() < 0.0) throw std::invalid_argument("complex mass must satisfy Im(m) >= 0");
  ComplexMass cm;
  cm.value = m;
  cm.infinite = false;
  return cm;
}

ComplexMass ComplexMass::infinite_mass() {
  ComplexMass cm;
  cm.infinite = true;
  return cm;
}

ComplexMass::Regime ComplexMass::regime() const {
  if (infinite) return Regime::infinite_mass;
  if (value.real() == 0.0) return Regime::diffusive;
  if (value.imag() == 0.0) return Regime::diffractive;
  return Regime::mixed;
}

double EvolvedField::log_abs_at(std::int64_t flat) const {
  return log_scale + std::log(std::abs(values[static_cast<std::size_t>(flat)]));
}

Complex EvolvedField::value_at(std::int64_t flat) const {
  return values[static_cast<std::size_t>(flat)] * std::exp(log_scale);
}

double EvolvedField::log_l2_norm() const {
  double acc = 0.0;
  for (const Complex& v : values) acc += std::norm(v);
  return log_scale + 0.5 * std::log(acc * grid.cell_volume());
}

double EvolvedField::max_abs() const {
  double m = 0.0;
  for (const Complex& v : values) m = std::max(m, std::abs(v));
  return m;
}

namespace {

int checked_step_count(double horizon, double dt) {
  if (!(horizon > 0.0) || !(dt > 0.0)) throw std::invalid_argument("horizon and dt must be positive");
  const long long n = std::llround(horizon / dt);
  if (n < 1 || std::abs(n * dt - horizon) > 1e-9 * std::max(1.0, horizon))
    throw std::invalid_argument("dt must divide the horizon");
  return static_cast<int>(n);
}

void check_resolution(const FieldModel& model) {
  for (int a = 0; a < model.grid.dim; ++a) {
    const int need = 8 * model.max_index_on_axis(a);
    if (model.grid.points_per_axis[a] < need)
      throw std::invalid_argument(
          "grid does not resolve twice the largest beamlet wavenumber (Nyquist margin >= 2)");
  }
}

// Half-step Fourier multipliers exp(-i |k|^2 (dt/2) / (2m)). Empty for the
// infinite-mass path.
std::vector<Complex> half_step_multipliers(const TorusGrid& grid, ComplexMass mass, double dt) {
  if (mass.infinite) return {};
  const auto k2 = wavenumber_squares(grid);
  std::vector<Complex> mult(k2.size());
  const Complex factor = Complex(0.0, -1.0) * (0.5 * dt) / (2.0 * mass.value);
  for (std::size_t i = 0; i < k2.size(); ++i) {
    mult[i] = std::exp(factor * k2[i]);
    if (std::abs(mult[i]) > 1.0 + 1e-12)
      throw std::logic_error("free propagator magnitude exceeds 1; Im(m) < 0 slipped through");
  }
  return mult;
}

struct StepWorkspace {
  const FieldModel& model;
  ComplexMass mass;
  double dt;
  std::vector<Complex> half_mult;
  FourierTransform fft;
  EvolvedField field;

  StepWorkspace(const FieldModel& m, ComplexMass mass_, double dt_)
      : model(m),
        mass(mass_),
        dt(dt_),
        half_mult(half_step_multipliers(m.grid, mass_, dt_)),
        fft(m.grid) {
    check_resolution(m);
    field.grid = m.grid;
    field.values.assign(static_cast<std::size_t>(m.grid.total_points), Complex(1.0, 0.0));
  }

  void free_half_step() {
    if (mass.infinite) return;
    fft.forward(field.values.data());
    for (std::size_t i = 0; i < field.values.size(); ++i) field.values[i] *= half_mult[i];
    fft.inverse(field.values.data());
  }

  void renormalize() {
    const double ma = field.max_abs();
    if (ma > 0.0 && (ma > 2.0 || ma < 0.5)) {
      field.log_scale += std::log(ma);
      const double inv = 1.0 / ma;
      for (Complex& v : field.values) v *= inv;
    }
  }

  // One Strang step; apply_potential multiplies values by the potential
  // factor evaluated at the midpoint time passed to it.
  template <typename PotentialStep>
  void run(int n_steps, PotentialStep&& apply_potential) {
    for (int j = 0; j < n_steps; ++j) {
      const double t_mid = (j + 0.5) * dt;
      free_half_step();
      apply_potential(t_mid);
      free_half_step();
      renormalize();
      field.step_count = j + 1;
      field.time = field.step_count * dt;
    }
  }
};

}  // namespace

EvolvedField solve_amplifier(const FieldModel& model, const GaussianDraw& draw, ComplexMass mass,
                             double lambda, double horizon, double dt) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
  const int n_steps = checked_step_count(horizon, dt);
  StepWorkspace ws(model, mass, dt);
  const int M = model.mode_count;
  const std::int64_t npts = model.grid.total_points;
  std::vector<Complex> coef(static_cast<std::size_t>(M));

  ws.run(n_steps, [&](double t_mid) {
    const Eigen::VectorXcd tc = model.time_coefficients(t_mid);
    for (int n = 0; n < M; ++n) coef[static_cast<std::size_t>(n)] = draw.s(n) * tc(n);
    for (std::int64_t i = 0; i < npts; ++i) {
      Complex s{0.0, 0.0};
      for (int n = 0; n < M; ++n) s += coef[static_cast<std::size_t>(n)] * model.spatial_phase[n](i);
      ws.field.values[static_cast<std::size_t>(i)] *= std::exp(lambda * std::norm(s) * dt);
    }
  });
  return std::move(ws.field);
}

EvolvedField solve_eta(const FieldModel& model, const Eigen::VectorXcd& eta, ComplexMass mass,
                       double horizon, double dt, const Eigen::VectorXd* centering) {
  const int n_steps = checked_step_count(horizon, dt);
  const int M = model.mode_count;
  if (eta.size() != static_cast<Eigen::Index>(M) * M)
    throw std::invalid_argument("eta must have M^2 components");
  Complex shift{0.0, 0.0};
  if (centering != nullptr) {
    if (centering->size() != eta.size())
      throw std::invalid_argument("centering must have M^2 components");
    for (Eigen::Index i = 0; i < eta.size(); ++i) shift += eta(i) * (*centering)(i);
  }
  const Eigen::MatrixXcd H = eta_matrix(M, eta);

  StepWorkspace ws(model, mass, dt);
  const std::int64_t npts = model.grid.total_points;
  Eigen::MatrixXcd Ht(M, M);
  const Complex minus_i{0.0, -1.0};

  ws.run(n_steps, [&](double t_mid) {
    const Eigen::VectorXcd tc = model.time_coefficients(t_mid);
    for (int n = 0; n < M; ++n)
      for (int m = 0; m < M; ++m) Ht(n, m) = H(n, m) * tc(n) * std::conj(tc(m));
    for (std::int64_t i = 0; i < npts; ++i) {
      Complex v = shift;
      for (int n = 0; n < M; ++n) {
        Complex row{0.0, 0.0};
        for (int m = 0; m < M; ++m) row += Ht(n, m) * std::conj(model.spatial_phase[m](i));
        v += model.spatial_phase[n](i) * row;
      }
      ws.field.values[static_cast<std::size_t>(i)] *= std::exp(minus_i * v * dt);
    }
  });
  return std::move(ws.field);
}

namespace {

// Potential table V(x, tau) = sum eta_i phi_i at a fixed time over the grid.
std::vector<Complex> potential_table(const FieldModel& model, const Eigen::MatrixXcd& H,
                                     double tau) {
  const int M = model.mode_count;
  const std::int64_t npts = model.grid.total_points;
  Eigen::MatrixXcd Ht(M, M);
  const Eigen::VectorXcd tc = model.time_coefficients(tau);
  for (int n = 0; n < M; ++n)
    for (int m = 0; m < M; ++m) Ht(n, m) = H(n, m) * tc(n) * std::conj(tc(m));
  std::vector<Complex> out(static_cast<std::size_t>(npts));
  for (std::int64_t i = 0; i < npts; ++i) {
    Complex v{0.0, 0.0};
    for (int n = 0; n < M; ++n) {
      Complex row{0.0, 0.0};
      for (int m = 0; m < M; ++m) row += Ht(n, m) * std::conj(model.spatial_phase[m](i));
      v += model.spatial_phase[n](i) * row;
    }
    out[static_cast<std::size_t>(i)] = v;
  }
  return out;
}

// Iterated-integral partial sum at a fixed trapezoid node count. Returns the
// field at the final node and the largest |V| seen (for the truncation bound).
std::pair<std::vector<Complex>, double> dyson_fixed_nodes(const FieldModel& model,
                                                          const Eigen::VectorXcd& eta,
                                                          ComplexMass mass, double horizon,
                                                          int order, int K) {
  const std::int64_t npts = model.grid.total_points;
  const std::size_t n = static_cast<std::size_t>(npts);
  const double delta = horizon / K;
  const Eigen::MatrixXcd H = eta_matrix(model.mode_count, eta);
  FourierTransform fft(model.grid);

  std::vector<Complex> u_delta;  // full-step free multipliers for spacing delta
  if (!mass.infinite) {
    const auto k2 = wavenumber_squares(model.grid);
    u_delta.resize(n);
    const Complex factor = Complex(0.0, -1.0) * delta / (2.0 * mass.value);
    for (std::size_t i = 0; i < n; ++i) u_delta[i] = std::exp(factor * k2[i]);
  }

  std::vector<std::vector<Complex>> vpot(static_cast<std::size_t>(K) + 1);
  double vmax = 0.0;
  for (int l = 0; l <= K; ++l) {
    vpot[static_cast<std::size_t>(l)] = potential_table(model, H, l * delta);
    for (const Complex& v : vpot[static_cast<std::size_t>(l)]) vmax = std::max(vmax, std::abs(v));
  }

  // psi_prev[l] = previous-order term at node l; order 0 is identically 1
  // (the free propagator leaves the constant initial datum unchanged).
  std::vector<std::vector<Complex>> psi_prev(static_cast<std::size_t>(K) + 1,
                                             std::vector<Complex>(n, Complex(1.0, 0.0)));
  std::vector<Complex> total(n, Complex(1.0, 0.0));

  std::vector<Complex> f(n), rhat(n), phat(n), psihat(n);
  const Complex minus_i{0.0, -1.0};

  for (int ord = 1; ord <= order; ++ord) {
    std::vector<std::vector<Complex>> psi_next(static_cast<std::size_t>(K) + 1,
                                               std::vector<Complex>(n, Complex(0.0, 0.0)));
    for (int k = 0; k <= K; ++k) {
      const auto& vp = vpot[static_cast<std::size_t>(k)];
      const auto& pp = psi_prev[static_cast<std::size_t>(k)];
      for (std::size_t i = 0; i < n; ++i) f[i] = vp[i] * pp[i];
      fft.forward(f.data());
      if (k == 0) {
        rhat = f;
        phat = f;
        continue;  // psi_next at tau=0 stays 0 for every order >= 1
      }
      for (std::size_t i = 0; i < n; ++i) {
        const Complex u = mass.infinite ? Complex(1.0, 0.0) : u_delta[i];
        rhat[i] = u * rhat[i] + f[i];
        phat[i] = u * phat[i];
        psihat[i] = minus_i * delta * (rhat[i] - 0.5 * phat[i] - 0.5 * f[i]);
      }
      auto& dst = psi_next[static_cast<std::size_t>(k)];
      dst.assign(psihat.begin(), psihat.end());
      fft.inverse(dst.data());
    }
    for (std::size_t i = 0; i < n; ++i) total[i] += psi_next[static_cast<std::size_t>(K)][i];
    psi_prev = std::move(psi_next);
  }
  return {std::move(total), vmax};
}

}  // namespace

DysonResult dyson_reference(const FieldModel& model, const Eigen::VectorXcd& eta, ComplexMass mass,
                            double horizon, int order, int nodes) {
  if (order < 0) throw std::invalid_argument("dyson order must be nonnegative");
  if (nodes < 2) throw std::invalid_argument("dyson needs at least 2 quadrature nodes");
  check_resolution(model);
  auto [coarse, vmax1] = dyson_fixed_nodes(model, eta, mass, horizon, order, nodes);
  auto [fine, vmax2] = dyson_fixed_nodes(model, eta, mass, horizon, order, 2 * nodes);

  DysonResult res;
  res.values.resize(coarse.size());
  double diff = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    res.values[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
    diff = std::max(diff, std::abs(fine[i] - coarse[i]));
  }
  res.quadrature_estimate = diff / 3.0;
  const double vmax = std::max(vmax1, vmax2);
  if (vmax > 0.0)
    res.truncation_bound =
        std::exp((order + 1) * std::log(vmax * horizon) - std::lgamma(order + 2.0));
  return res;
}

double antiholomorphy_residual(const FieldModel& model, ComplexMass mass, double horizon,
                               double dt, const Eigen::VectorXcd& eta0, int component,
                               double step) {
  const int N = static_cast<int>(eta0.size());
  if (component < 0 || component >= N) throw std::out_of_range("component out of range");
  const double scale = std::max(1.0, std::abs(eta0(component)));
  const double h = step * scale;

  auto solve_at = [&](Complex offset) {
    Eigen::VectorXcd eta = eta0;
    eta(component) += offset;
    return solve_eta(model, eta, mass, horizon, dt);
  };
  const EvolvedField ep = solve_at(Complex(h, 0.0));
  const EvolvedField em = solve_at(Complex(-h, 0.0));
  const EvolvedField eip = solve_at(Complex(0.0, h));
  const EvolvedField eim = solve_at(Complex(0.0, -h));

  const double ref =
      std::max(std::max(ep.log_scale, em.log_scale), std::max(eip.log_scale, eim.log_scale));
  double res = 0.0;
  const Complex i_unit{0.0, 1.0};
  for (std::size_t i = 0; i < ep.values.size(); ++i) {
    const Complex dx = (ep.values[i] * std::exp(ep.log_scale - ref) -
                        em.values[i] * std::exp(em.log_scale - ref)) /
                       (2.0 * h);
    const Complex dy = (eip.values[i] * std::exp(eip.log_scale - ref) -
                        eim.values[i] * std::exp(eim.log_scale - ref)) /
                       (2.0 * h);
    res = std::max(res, 0.5 * std::abs(dx + i_unit * dy));
  }
  return res * std::exp(ref);
}

}  // namespace ampcrit
