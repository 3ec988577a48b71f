#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "ampcrit/torus.hpp"

namespace ampcrit {

using Complex = std::complex<double>;

// Pointwise Hermitian M x M form; gamma(x,t) = conj(Phi) Phi^T is rank one and
// positive semidefinite, time integrals of it are PSD of rank up to M.
struct HermitianForm {
  Eigen::MatrixXcd entries;

  int order() const { return static_cast<int>(entries.rows()); }
  // Eigenvalues sorted descending (they are real for Hermitian input).
  Eigen::VectorXd eigenvalues_descending() const;
  // Top eigenpair; on a near-degenerate top cluster (gap below gap_tol) picks
  // the eigenvector with largest |<reference, v>| to keep iterations continuous.
  std::pair<double, Eigen::VectorXcd> top_eigenpair(
      const Eigen::VectorXcd* reference = nullptr, double gap_tol = 1e-10) const;
};

// One realization s of the beamlet amplitudes together with its monomial
// vector k(s). Ordering of k: |s_n|^2 for n = 0..M-1, then sqrt(2)*Re(s_n s_m*)
// for n < m in lexicographic order, then sqrt(2)*Im(s_n s_m*) same order.
struct GaussianDraw {
  Eigen::VectorXcd s;
  Eigen::VectorXd k_vector;
  double norm_s = 0.0;  // ||s||

  static GaussianDraw from_amplitudes(const Eigen::VectorXcd& s);
};

// Index bookkeeping for the N = M^2 monomials. Kind 0: diagonal (n == m),
// kind 1: sqrt(2)*Re off-diagonal, kind 2: sqrt(2)*Im off-diagonal.
struct MonomialIndex {
  int kind;
  int n;
  int m;
};
MonomialIndex monomial_index(int M, int i);
int monomial_count(int M);

// Superposition of M plane-wave beamlets on a torus grid,
//   Phi_n(x,t) = A_n * exp(i (k_n . x + a |k_n|^2 t)),
// with amplitudes rescaled by one global factor so that
//   (1/|L|) * sum_n int_0^1 int_L |Phi_n|^2 dtau dx = 1.
// Immutable after construction; safe to share across threads.
struct FieldModel {
  TorusGrid grid;
  int mode_count = 0;
  std::vector<std::array<int, 3>> mode_indices;
  std::vector<std::array<double, 3>> wavevectors;
  Eigen::VectorXd mode_k2;  // |k_n|^2
  double dispersion_a = 0.0;
  Eigen::VectorXd amplitudes;          // normalized A_n
  double normalization_factor = 1.0;   // applied to the raw amplitudes

  // exp(i k_n . x_j) over all grid points, one table per mode.
  std::vector<Eigen::VectorXcd> spatial_phase;

  Complex mode_at(int n, const Point& x, double t) const;
  // Phi(x,t) as a column vector.
  Eigen::VectorXcd beamlets_at(const Point& x, double t) const;
  // A_n * exp(i a |k_n|^2 t) for all modes (combines with spatial_phase).
  Eigen::VectorXcd time_coefficients(double t) const;
  // Largest |k_n . e_axis| index magnitude per axis, for resolution checks.
  int max_index_on_axis(int axis) const;
};

FieldModel build_beamlet_model(const TorusGrid& grid,
                               const std::vector<std::array<int, 3>>& wavevector_indices,
                               double dispersion_a,
                               const std::vector<double>& raw_amplitudes);

// Deterministic i.i.d. circular complex Gaussian draw for (seed, index).
GaussianDraw sample_gaussian(const FieldModel& model, std::uint64_t stream_seed,
                             std::uint64_t sample_index);

Complex eval_field(const FieldModel& model, const GaussianDraw& draw, const Point& x, double t);

HermitianForm gamma_at(const FieldModel& model, const Point& x, double t);

// phi_i(x,t) ordered consistently with GaussianDraw::k_vector, so that
// sum_i k_i(s) phi_i(x,t) = s^dag gamma(x,t) s = |S(x,t)|^2.
Eigen::VectorXd monomials(const FieldModel& model, const Point& x, double t);

// Single monomial phi_i(x,t).
double monomial_at(const FieldModel& model, int i, const Point& x, double t);

// H(eta) with sum_i eta_i phi_i(x,t) = Phi(x,t)^T H conj(Phi(x,t)).
// For eta = i*lambda*k(s) this is i*lambda * s s^dag.
Eigen::MatrixXcd eta_matrix(int M, const Eigen::VectorXcd& eta);

// Grid quadrature of the normalization integral (tau over [0,1] by convention).
double normalization_integral(const FieldModel& model, int time_slices = 64);

}  // namespace ampcrit
