#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ampcrit/field_model.hpp"
#include "ampcrit/path_functionals.hpp"
#include "ampcrit/solver.hpp"
#include "ampcrit/spectral_optimizer.hpp"

namespace ampcrit {

// ln|E(x,t;r sigma)| along a radius ladder; the fitted slope against r^2
// estimates lambda * H_{x,t}(sigma).
struct SlopeFit {
  std::vector<double> radii;
  std::vector<double> log_moduli;
  double slope = 0.0;
  double intercept = 0.0;
  double confidence_halfwidth = 0.0;
  bool flagged = false;  // fit residual above threshold (oscillatory regimes)
};

struct LadderOptions {
  double potential_per_step = 0.05;  // dt chosen so lambda r^2 dt <= this
  int min_steps = 256;
  double window_fraction = 0.5;      // least-squares window, top of the ladder
  bool envelope = false;             // fit the sliding max over 3 rungs
  double residual_threshold = 0.05;  // relative rms residual that flags the fit
};

SlopeFit growth_slope(const FieldModel& model, ComplexMass mass, double lambda,
                      const Direction& sigma, const std::vector<double>& radii, const Point& probe,
                      double horizon, const LadderOptions& opts = {});

// Paley-Wiener diagnostics on one monomial axis: the centered solution must
// grow no faster than exp(kappa_j rho) in eta = i rho e_j (both signs), and
// the uncentered growth rates recover the support endpoints b_j and -a_j.
struct PaleyWienerReport {
  int axis = 0;
  std::vector<double> rho;
  std::vector<double> log_mod_plus, log_mod_minus;
  std::vector<double> centered_plus, centered_minus;
  double slope_plus = 0.0;           // -> b_j
  double slope_minus = 0.0;          // -> -a_j
  double centered_slope_plus = 0.0;  // <= kappa_j + tol
  double centered_slope_minus = 0.0;
  double a = 0.0, b = 0.0, kappa = 0.0;
};

struct PaleyWienerOptions {
  double potential_per_step = 0.05;
  int min_steps = 256;
  double window_fraction = 0.5;
  double bound_tol = 1e-3;  // slack on the centered slope bound
};

// Throws if a centered slope exceeds kappa_j + bound_tol.
PaleyWienerReport paley_wiener_check(const FieldModel& model, ComplexMass mass,
                                     const TimeGrid& tgrid, int axis,
                                     const std::vector<double>& rho_list, const Point& probe,
                                     const PaleyWienerOptions& opts = {});

// <exp(q lambda int |S|^2)> for the Laplacian-free model from the covariance
// eigenvalues: prod_i (1 - q lambda mu_i)^{-1}, infinite once q lambda mu_1 >= 1.
struct FreeMoment {
  bool finite = false;
  double value = 0.0;  // +inf marker when not finite
};
FreeMoment closed_form_free_moment(const Eigen::VectorXd& eigenvalues, int q, double lambda);

// Monte-Carlo estimate of <|E(x,t)|^q>. The finiteness decision always comes
// from the proposition criterion q lambda mu < 1, never from sampling; when
// the criterion already says divergent the mean is refused (NaN).
struct MomentEstimate {
  int q = 1;
  double lambda = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
  bool finite_flag = false;
  double mu_hat = 0.0;  // criterion eigen/optimizer value used for the flag
};

struct McOptions {
  int threads = 1;
  int solver_min_steps = 0;          // 0: use tgrid.slices
  double potential_per_step = 0.05;  // finite-mass per-sample dt refinement
  MuOptions mu;                      // criterion optimizer settings
};

MomentEstimate mc_moment(const FieldModel& model, ComplexMass mass, double lambda, int q,
                         const Point& x, const TimeGrid& tgrid, std::int64_t n_samples,
                         std::uint64_t stream_seed, const McOptions& opts = {});

// Classification scan over a lambda grid. class columns are "divergent" when
// q lambda mu >= 1 with mu = mu_xt (propagating) or mu1 at the fixed probe
// (Laplacian-free); Monte Carlo runs only for q lambda mu_hat <= mc_threshold.
struct ScanRow {
  double lambda = 0.0;
  double qlmu = 0.0;  // q * lambda * mu_xt
  bool divergent_prop = false;
  bool divergent_free = false;
  bool has_mc = false;
  MomentEstimate mc;
};

struct ScanOptions {
  std::int64_t mc_samples = 0;  // 0 disables sampling
  double mc_threshold = 0.5;
  std::uint64_t stream_seed = 1;
  McOptions mc;
};

struct ScanResult {
  double mu_xt = 0.0;
  double mu1_const = 0.0;
  std::vector<ScanRow> rows;
};

ScanResult lambda_scan(const FieldModel& model, ComplexMass mass, int q,
                       const std::vector<double>& lambda_grid, const Point& x,
                       const TimeGrid& tgrid, const ScanOptions& opts = {});

// Least-squares slope of y against x over the trailing window (shared by the
// ladder fits); halfwidth is twice the standard error of the slope.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double halfwidth = 0.0;
  double rms_residual = 0.0;
};
LineFit fit_line_window(const std::vector<double>& x, const std::vector<double>& y,
                        double window_fraction);

}  // namespace ampcrit
