#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "ampcrit/field_model.hpp"
#include "ampcrit/torus.hpp"

namespace ampcrit {

// Complex mass m with Im(m) >= 0, m != 0; the infinite flag selects the
// Laplacian-free limit m^{-1} = 0 as a dedicated code path.
struct ComplexMass {
  Complex value{0.0, 1.0};
  bool infinite = false;

  enum class Regime { diffusive, diffractive, mixed, infinite_mass };

  static ComplexMass finite(Complex m);
  static ComplexMass infinite_mass();
  Regime regime() const;
};

// Field on the grid with a running log rescale: the physical field is
// values * exp(log_scale). After each renormalization max|values| lies
// in [0.5, 2].
struct EvolvedField {
  TorusGrid grid;
  std::vector<Complex> values;
  double log_scale = 0.0;
  double time = 0.0;
  int step_count = 0;

  double log_abs_at(std::int64_t flat) const;
  Complex value_at(std::int64_t flat) const;  // values[flat] * exp(log_scale); may overflow
  double log_l2_norm() const;                 // log of the continuum-normalized L2 norm
  double max_abs() const;                     // of values, excluding the log_scale factor
};

// Strang split-step integration of
//   d_t E = (i/2m) Lap E + lambda |S|^2 E,   E(.,0) = 1,
// with the exact spectral free propagator and the potential sampled at the
// midpoint of each step. dt must divide the horizon; the grid must resolve
// twice the largest beamlet wavenumber with a margin of 2.
EvolvedField solve_amplifier(const FieldModel& model, const GaussianDraw& draw, ComplexMass mass,
                             double lambda, double horizon, double dt);

// Same propagator for i d_t Psi = -(1/2m) Lap Psi + V Psi, Psi(.,0) = 1, with
// V(x,t) = sum_i eta_i phi_i(x,t); eta may be fully complex. When centering
// is given, phi_i is replaced by phi_i + centering_i.
EvolvedField solve_eta(const FieldModel& model, const Eigen::VectorXcd& eta, ComplexMass mass,
                       double horizon, double dt,
                       const Eigen::VectorXd* centering = nullptr);

// Truncated Dyson series with exact Fourier free propagators and trapezoid
// time quadrature, Richardson-extrapolated from nodes and 2*nodes levels.
struct DysonResult {
  std::vector<Complex> values;       // Psi(., horizon), physical scale
  double truncation_bound = 0.0;     // (sup|V| * t)^{n+1} / (n+1)!
  double quadrature_estimate = 0.0;  // max |D_2K - D_K| / 3
};
DysonResult dyson_reference(const FieldModel& model, const Eigen::VectorXcd& eta, ComplexMass mass,
                            double horizon, int order, int nodes = 128);

// Central-difference estimate of the antiholomorphic derivative
// d Psi / d conj(eta_j) at eta0, max modulus over the grid. The solution is
// analytic in eta, so the residual shrinks like h^2.
double antiholomorphy_residual(const FieldModel& model, ComplexMass mass, double horizon,
                               double dt, const Eigen::VectorXcd& eta0, int component,
                               double step = 1e-3);

}  // namespace ampcrit
