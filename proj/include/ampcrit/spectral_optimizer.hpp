#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ampcrit/field_model.hpp"
#include "ampcrit/path_functionals.hpp"

namespace ampcrit {

// Unit direction in C^M, gauge-fixed so the first component above threshold
// is real and positive (removes the global phase).
struct Direction {
  Eigen::VectorXcd sigma;
  static Direction make(const Eigen::VectorXcd& v);
};

// H_{x,t}(sigma) = int_0^t sup_x sigma^dag gamma(x,tau) sigma dtau together
// with the per-slice maximizer profile. The path supremum collapses to a
// per-slice spatial supremum, so no endpoint argument appears.
struct DirectionValue {
  double value = 0.0;
  std::vector<Point> maximizers;
};
DirectionValue direction_value(const FieldModel& model, const Direction& sigma,
                               const TimeGrid& tgrid);

// Midpoint time quadrature of gamma along a path / at a fixed point /
// along an explicit per-slice midpoint profile.
HermitianForm integrated_gamma(const FieldModel& model, const Point& x, const TimeGrid& tgrid);
HermitianForm integrated_gamma(const FieldModel& model, const DiscretePath& path,
                               const TimeGrid& tgrid);
HermitianForm integrated_gamma_profile(const FieldModel& model,
                                       const std::vector<Point>& slice_points,
                                       const TimeGrid& tgrid);

struct MuOptions {
  int n_starts = 8;
  int max_iters = 200;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  int threads = 1;
  // Fixed point whose integrated gamma seeds start 0; it also stays in the
  // per-slice candidate set, so mu >= mu1[x(.) = anchor] holds exactly.
  Point anchor{0.0, 0.0, 0.0};
};

// mu_{x,t} by alternating maximization: per-slice argmax of the quadratic
// form at the current direction, then the top eigenvector of the profile-
// integrated gamma. The objective is non-decreasing along each start; the
// best over starts is returned. Start 0 is the top eigenvector of the
// fixed-origin integrated gamma, which makes mu >= mu1[x(.) = x] by
// construction; the remaining starts are seeded random directions.
struct MuResult {
  double mu = 0.0;
  Direction sigma_star;
  std::vector<Point> slice_maximizers;
  std::vector<double> trace;  // winning start, objective per iteration
  int starts_used = 0;
  bool converged = false;
  std::vector<std::vector<double>> all_traces;
  std::vector<double> start_values;
};
MuResult mu_alternating(const FieldModel& model, const TimeGrid& tgrid, const MuOptions& opts = {});

// Brute-force sphere maximum of direction_value for M <= 2,
// parametrized (cos theta, sin theta e^{i phi}) up to global phase.
double mu_oracle_sphere_grid(const FieldModel& model, const TimeGrid& tgrid, int resolution);

// Nystrom spectrum of the covariance operator with kernel
// <S*(x(tau),tau) S(x(tau'),tau')> = sum_n Phi_n*(x(tau),tau) Phi_n(x(tau'),tau'),
// trapezoid weights symmetrized as D^{1/2} C D^{1/2}.
struct CovarianceSpectrum {
  Eigen::VectorXd eigenvalues;  // descending
  std::vector<double> nodes;
};
CovarianceSpectrum nystrom_covariance_eigs(const FieldModel& model, const Point& x,
                                           double horizon, int K);
CovarianceSpectrum nystrom_covariance_eigs(const FieldModel& model, const DiscretePath& path,
                                           int K);

// lambda_q = 1/(q mu_{x,t}) against the Laplacian-free lambda_bar_q =
// 1/(q mu_1[x(.)=x]); the inequality lambda_q <= lambda_bar_q is enforced as
// a post-check (violation beyond 1e-10 signals an optimizer or quadrature bug).
struct CriticalReport {
  int q = 1;
  double mu_xt = 0.0;
  double lambda_q = 0.0;
  double mu1_const = 0.0;
  double lambda_bar_q = 0.0;
  double ratio = 0.0;  // lambda_bar_q / lambda_q
};
CriticalReport critical_report(const FieldModel& model, const TimeGrid& tgrid, int q,
                               const Point& x, const MuOptions& opts = {});

}  // namespace ampcrit
