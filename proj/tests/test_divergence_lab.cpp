#include "doctest.h"

#include <cmath>

#include "ampcrit/divergence_lab.hpp"
#include "ampcrit/model_zoo.hpp"
#include "ampcrit/rng.hpp"

using namespace ampcrit;

TEST_CASE("uniform beamlet slope is exactly lambda t for every regime") {
  const FieldModel m = uniform_beamlet();
  Eigen::VectorXcd e1(1);
  e1 << 1.0;
  const Direction sigma = Direction::make(e1);
  const std::vector<double> radii{0.5, 1.0, 2.0, 4.0};
  const double lambda = 0.6, t = 1.0;
  for (ComplexMass mass : {ComplexMass::finite({0.0, 1.0}), ComplexMass::finite({1.0, 0.0}),
                           ComplexMass::infinite_mass()}) {
    const SlopeFit fit = growth_slope(m, mass, lambda, sigma, radii, m.grid.point(0), t);
    CHECK(fit.slope == doctest::Approx(lambda * t).epsilon(1e-10));
    CHECK_FALSE(fit.flagged);
  }
}

TEST_CASE("zero coupling gives zero slope") {
  const FieldModel m = two_equal_beamlets(1.0);
  Eigen::VectorXcd v(2);
  v << 1.0, 1.0;
  const SlopeFit fit = growth_slope(m, ComplexMass::finite({0.0, 1.0}), 0.0,
                                    Direction::make(v), {1.0, 2.0, 4.0}, m.grid.point(0), 1.0);
  CHECK(std::abs(fit.slope) < 1e-12);
}

TEST_CASE("slope approaches lambda mu from below at the optimal direction") {
  const double t = 2.0, lambda = 0.05;
  const FieldModel m = two_equal_beamlets(1.0);
  const TimeGrid tg = TimeGrid::make(t, 256);
  MuOptions mo;
  mo.n_starts = 4;
  const MuResult mu = mu_alternating(m, tg, mo);

  std::vector<double> radii;
  const double r2max = 48.0 / (lambda * mu.mu);
  for (int i = 5; i >= 0; --i) radii.push_back(std::sqrt(r2max * std::pow(2.0, -i)));

  const SlopeFit fit = growth_slope(m, ComplexMass::finite({0.0, 1.0}), lambda, mu.sigma_star,
                                    radii, m.grid.point(0), t);
  CHECK(fit.slope <= lambda * mu.mu * (1.0 + 1e-6));
  CHECK(fit.slope >= lambda * mu.mu * 0.95);
}

TEST_CASE("fitted slope never exceeds lambda H(sigma) for off-optimal directions") {
  const FieldModel m = two_equal_beamlets(0.9);
  const TimeGrid tg = TimeGrid::make(1.0, 256);
  const double lambda = 0.2;
  for (std::uint64_t seed : {3u, 4u}) {
    Eigen::VectorXcd v(2);
    for (int n = 0; n < 2; ++n)
      v(n) = Complex(rng::uniform01(seed, 2 * n) - 0.5, rng::uniform01(seed, 2 * n + 1) - 0.5);
    const Direction sigma = Direction::make(v);
    const double H = direction_value(m, sigma, tg).value;
    std::vector<double> radii;
    for (int i = 5; i >= 0; --i) radii.push_back(std::sqrt(800.0 * std::pow(2.0, -i)));
    const SlopeFit fit =
        growth_slope(m, ComplexMass::finite({0.0, 1.0}), lambda, sigma, radii, m.grid.point(0), 1.0);
    CHECK(fit.slope <= lambda * H + 0.01 * lambda * H);
  }
}

TEST_CASE("paley-wiener: constant mode has kappa = 0 and endpoint slope t") {
  const FieldModel m = uniform_beamlet();
  const TimeGrid tg = TimeGrid::make(1.0, 64);
  const std::vector<double> rho{4.0, 8.0, 16.0, 32.0};
  const PaleyWienerReport rep =
      paley_wiener_check(m, ComplexMass::finite({0.0, 1.0}), tg, 0, rho, m.grid.point(0));
  CHECK(rep.kappa == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(rep.centered_slope_plus) < 1e-10);
  CHECK(std::abs(rep.centered_slope_minus) < 1e-10);
  CHECK(rep.slope_plus == doctest::Approx(1.0).epsilon(1e-9));   // b = t
  CHECK(rep.slope_minus == doctest::Approx(-1.0).epsilon(1e-9)); // -a = -t
}

TEST_CASE("paley-wiener: off-diagonal axis approaches the support endpoints") {
  const FieldModel m = two_equal_beamlets(1.0);
  const TimeGrid tg = TimeGrid::make(1.0, 128);
  std::vector<double> rho;
  for (int i = 0; i < 7; ++i) rho.push_back(25.0 * std::pow(2.0, i * 0.5));
  const PaleyWienerReport rep =
      paley_wiener_check(m, ComplexMass::finite({0.0, 4.0}), tg, 2, rho, m.grid.point(0));
  CHECK(rep.slope_plus == doctest::Approx(rep.b).epsilon(0.02));
  CHECK(rep.slope_minus == doctest::Approx(-rep.a).epsilon(0.02));
  CHECK(rep.centered_slope_plus <= rep.kappa + 1e-3);
  CHECK(rep.centered_slope_minus <= rep.kappa + 1e-3);
}

TEST_CASE("closed-form free moment") {
  Eigen::VectorXd eigs(3);
  eigs << 1.0, 0.4, 0.1;
  CHECK(closed_form_free_moment(eigs, 2, 0.0).value == doctest::Approx(1.0));
  const FreeMoment at_half = closed_form_free_moment(eigs, 1, 0.5);
  CHECK(at_half.finite);
  CHECK(at_half.value == doctest::Approx(1.0 / (0.5 * 0.8 * 0.95)).epsilon(1e-12));
  CHECK_FALSE(closed_form_free_moment(eigs, 1, 1.0).finite);
  CHECK_FALSE(closed_form_free_moment(eigs, 2, 0.5).finite);
  CHECK(std::isinf(closed_form_free_moment(eigs, 2, 0.5).value));
}

TEST_CASE("single-eigenvalue free moment against a large Monte-Carlo oracle") {
  // <exp(q lambda |s|^2 t)> with q lambda t = 1/2 equals 2
  const double t = 1.3;
  Eigen::VectorXd eigs(1);
  eigs << t;
  const double lambda = 0.5 / t;
  CHECK(closed_form_free_moment(eigs, 1, lambda).value == doctest::Approx(2.0).epsilon(1e-12));
  double acc = 0.0;
  const std::int64_t n = 1000000;
  for (std::int64_t i = 0; i < n; ++i) {
    const Complex s = rng::standard_complex(12345, static_cast<std::uint64_t>(i));
    acc += std::exp(lambda * std::norm(s) * t);
  }
  CHECK(acc / n == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("mc moment: lambda = 0 is exactly one, divergent criterion refuses the mean") {
  const FieldModel m = two_equal_beamlets(1.2);
  const TimeGrid tg = TimeGrid::make(1.0, 64);
  const MomentEstimate zero = mc_moment(m, ComplexMass::infinite_mass(), 0.0, 2,
                                        m.grid.point(0), tg, 500, 3);
  CHECK(zero.mean == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(zero.std_error == doctest::Approx(0.0));
  CHECK(zero.finite_flag);

  const MomentEstimate refused = mc_moment(m, ComplexMass::infinite_mass(), 10.0, 2,
                                           m.grid.point(0), tg, 500, 3);
  CHECK_FALSE(refused.finite_flag);
  CHECK(std::isnan(refused.mean));
  CHECK(refused.samples == 0);
}

TEST_CASE("infinite-mass mc moment matches the closed form") {
  const FieldModel m = two_equal_beamlets(0.8);
  const TimeGrid tg = TimeGrid::make(1.0, 256);
  const Eigen::VectorXd eigs = integrated_gamma(m, m.grid.point(0), tg).eigenvalues_descending();
  const int q = 2;
  const double lambda = 0.5 / (q * eigs(0));
  const FreeMoment ref = closed_form_free_moment(eigs, q, lambda);
  McOptions mo;
  mo.threads = 2;
  const MomentEstimate est = mc_moment(m, ComplexMass::infinite_mass(), lambda, q,
                                       m.grid.point(0), tg, 100000, 77, mo);
  CHECK(est.finite_flag);
  CHECK(std::abs(est.mean - ref.value) <= 3.0 * est.std_error);
}

TEST_CASE("infinite-mass sampling path equals the dedicated solver path") {
  const FieldModel m = two_equal_beamlets(1.4);
  const TimeGrid tg = TimeGrid::make(1.0, 128);
  const Eigen::MatrixXcd G = integrated_gamma(m, m.grid.point(5), tg).entries;
  for (std::uint64_t i = 0; i < 5; ++i) {
    const GaussianDraw d = sample_gaussian(m, 9, i);
    const double lambda = 0.3;
    const double quad = lambda * std::real(d.s.dot(G * d.s));
    const EvolvedField f =
        solve_amplifier(m, d, ComplexMass::infinite_mass(), lambda, 1.0, 1.0 / 128);
    CHECK(f.log_abs_at(5) == doctest::Approx(quad).epsilon(1e-12));
  }
}

TEST_CASE("finite-mass mc moment is stable under sample doubling") {
  const FieldModel m = two_equal_beamlets(1.0);
  const TimeGrid tg = TimeGrid::make(1.0, 128);
  MuOptions mu_opts;
  mu_opts.n_starts = 2;
  const double mu = mu_alternating(m, tg, mu_opts).mu;
  const int q = 1;
  const double lambda = 0.3 / (q * mu);
  McOptions mo;
  mo.threads = 2;
  mo.mu = mu_opts;
  const MomentEstimate a =
      mc_moment(m, ComplexMass::finite({0.0, 1.0}), lambda, q, m.grid.point(0), tg, 800, 5, mo);
  const MomentEstimate b =
      mc_moment(m, ComplexMass::finite({0.0, 1.0}), lambda, q, m.grid.point(0), tg, 1600, 5, mo);
  CHECK(a.finite_flag);
  CHECK(std::abs(a.mean - b.mean) <= 2.0 * (a.std_error + b.std_error));
}

TEST_CASE("lambda scan classifications flip at the critical couplings") {
  // M = 1: both classifications flip together at lambda = 1/(q t)
  const FieldModel m1 = uniform_beamlet();
  const TimeGrid tg = TimeGrid::make(1.0, 128);
  const ScanResult s1 = lambda_scan(m1, ComplexMass::finite({0.0, 1.0}), 2,
                                    {0.2, 0.4, 0.49, 0.51, 0.7}, m1.grid.point(0), tg);
  for (const ScanRow& row : s1.rows) CHECK(row.divergent_prop == row.divergent_free);
  CHECK_FALSE(s1.rows[2].divergent_prop);
  CHECK(s1.rows[3].divergent_prop);

  // omega t = 2 pi: the window (1/(q t), 2/(q t)) is divergent only with propagation
  const FieldModel m2 = two_equal_beamlets(2.0 * M_PI);
  const ScanResult s2 = lambda_scan(m2, ComplexMass::finite({0.0, 1.0}), 1,
                                    {0.5, 0.9, 1.1, 1.5, 1.9, 2.1}, m2.grid.point(0),
                                    TimeGrid::make(1.0, 512));
  CHECK_FALSE(s2.rows[0].divergent_prop);
  CHECK(s2.rows[2].divergent_prop);
  CHECK_FALSE(s2.rows[2].divergent_free);
  CHECK(s2.rows[4].divergent_prop);
  CHECK_FALSE(s2.rows[4].divergent_free);
  CHECK(s2.rows[5].divergent_free);

  // classification is monotone in lambda
  bool seen_div = false;
  for (const ScanRow& row : s2.rows) {
    if (seen_div) CHECK(row.divergent_prop);
    seen_div = seen_div || row.divergent_prop;
  }
}

TEST_CASE("line fit recovers an exact line and reports residuals") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> y{1.5, 3.5, 5.5, 7.5};
  const LineFit f = fit_line_window(x, y, 1.0);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.intercept == doctest::Approx(-0.5).epsilon(1e-13));
  CHECK(f.rms_residual < 1e-13);
}
