// Acceptance battery: one criterion per function, each printing a single
// [PASS]/[FAIL] line plus optional diagnostics. Run all with no arguments or
// a single criterion by number. Exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ampcrit/divergence_lab.hpp"
#include "ampcrit/model_zoo.hpp"
#include "ampcrit/parallel.hpp"
#include "ampcrit/rng.hpp"

using namespace ampcrit;

namespace {

struct Criterion {
  int id;
  std::string name;
  std::function<bool(std::ostream&)> run;
};

Eigen::VectorXcd random_eta(int N, std::uint64_t seed, double scale) {
  Eigen::VectorXcd eta(N);
  for (int i = 0; i < N; ++i)
    eta(i) = scale * Complex(rng::uniform01(seed, 2 * static_cast<std::uint64_t>(i)) - 0.5,
                             rng::uniform01(seed, 2 * static_cast<std::uint64_t>(i) + 1) - 0.5);
  return eta;
}

// --- 1. monomial identity --------------------------------------------------

bool crit_monomial_identity(std::ostream& os) {
  double worst = 0.0;
  for (int ms = 0; ms < 100; ++ms) {
    RandomModelOptions opts;
    opts.min_modes = 1;
    opts.max_modes = 4;
    opts.max_dim = 2;
    opts.points_1d = 16;  // identity checks need no spectral resolution
    opts.points_2d = 8;
    const FieldModel m = random_model(1000 + static_cast<std::uint64_t>(ms), opts);
    const std::uint64_t s2 = rng::substream(77, static_cast<std::uint64_t>(ms));
    for (int trial = 0; trial < 100; ++trial) {
      const GaussianDraw d = sample_gaussian(m, s2, static_cast<std::uint64_t>(trial));
      Point x{0, 0, 0};
      for (int a = 0; a < m.grid.dim; ++a)
        x[a] = rng::uniform01(s2, 7000 + 3 * trial + a) * m.grid.lengths[a];
      const double t = 2.0 * rng::uniform01(s2, 9000 + trial);
      const Eigen::VectorXd phi = monomials(m, x, t);
      const double rhs = std::norm(eval_field(m, d, x, t));
      worst = std::max(worst, std::abs(phi.dot(d.k_vector) - rhs) / std::max(1.0, rhs));
      const double knorm = d.k_vector.norm();
      const double s2n = d.norm_s * d.norm_s;
      worst = std::max(worst, std::abs(knorm - s2n) / std::max(1.0, s2n));
    }
  }
  os << "  max relative error over 10^4 draws: " << worst << "\n";
  return worst < 1e-11;
}

// --- 2. solver identities ----------------------------------------------------

bool crit_solver_identities(std::ostream& os) {
  bool ok = true;

  // (a) uniform beamlet exact solution, all mass regimes
  {
    const FieldModel m = uniform_beamlet();
    Eigen::VectorXcd s(1);
    s << Complex(M_SQRT2, 0.0);
    const GaussianDraw d = GaussianDraw::from_amplitudes(s);
    double worst = 0.0;
    for (ComplexMass mass : {ComplexMass::finite({0.0, 1.0}), ComplexMass::finite({1.0, 0.0}),
                             ComplexMass::finite({1.0, 1.0}), ComplexMass::infinite_mass()}) {
      const EvolvedField f = solve_amplifier(m, d, mass, 1.5, 1.0, 1.0 / 1024);
      for (std::int64_t g = 0; g < m.grid.total_points; ++g)
        worst = std::max(worst, std::abs(f.log_abs_at(g) - 3.0) / 3.0);
    }
    os << "  (a) uniform-beamlet max rel err: " << worst << "\n";
    ok = ok && worst < 1e-10;
  }

  // (b) E(s) = Psi(i lambda k(s)) on 20 random M=2 cases
  {
    double worst = 0.0;
    const Complex masses[3] = {{0.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}};
    for (int c = 0; c < 20; ++c) {
      const FieldModel m = random_model(2000 + static_cast<std::uint64_t>(c));
      const GaussianDraw d = sample_gaussian(m, 31, static_cast<std::uint64_t>(c));
      const ComplexMass mass = ComplexMass::finite(masses[c % 3]);
      const double lambda = 0.3 + 0.02 * c;
      const EvolvedField e = solve_amplifier(m, d, mass, lambda, 1.0, 1.0 / 512);
      const Eigen::VectorXcd eta = Complex(0.0, lambda) * d.k_vector;
      const EvolvedField p = solve_eta(m, eta, mass, 1.0, 1.0 / 512);
      for (std::int64_t f = 0; f < m.grid.total_points; ++f) {
        const double le = e.log_abs_at(f);
        worst = std::max(worst, std::abs(le - p.log_abs_at(f)) / std::max(1.0, std::abs(le)));
      }
    }
    os << "  (b) eta-identity max rel log err: " << worst << "\n";
    ok = ok && worst < 1e-9;
  }

  // (c) norm conservation: lambda = 0 amplifier stays 1; real potential with
  // real mass is unitary
  {
    const FieldModel m = random_model(2100);
    const GaussianDraw d = sample_gaussian(m, 32, 0);
    const EvolvedField e =
        solve_amplifier(m, d, ComplexMass::finite({1.0, 0.0}), 0.0, 1.0, 1.0 / 1024);
    double drift = std::abs(e.log_l2_norm() - 0.5 * std::log(m.grid.volume()));
    Eigen::VectorXcd eta = random_eta(monomial_count(m.mode_count), 33, 2.0);
    eta = eta.real().cast<Complex>();
    const EvolvedField p = solve_eta(m, eta, ComplexMass::finite({1.0, 0.0}), 1.0, 1.0 / 1024);
    drift = std::max(drift, std::abs(p.log_l2_norm() - 0.5 * std::log(m.grid.volume())));
    os << "  (c) norm drift per unit time: " << drift << "\n";
    ok = ok && drift < 1e-10;
  }
  return ok;
}

// --- 3. dyson oracle ---------------------------------------------------------

bool crit_dyson_oracle(std::ostream& os) {
  const double t = 0.05;
  bool ok = true;
  double ratio_sum = 0.0;
  const Complex masses[3] = {{0.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}};
  for (int c = 0; c < 10; ++c) {
    const FieldModel m = random_model(3000 + static_cast<std::uint64_t>(c));
    const Eigen::VectorXcd eta =
        random_eta(monomial_count(m.mode_count), 300 + static_cast<std::uint64_t>(c), 2.0);
    const ComplexMass mass = ComplexMass::finite(masses[c % 3]);
    const DysonResult dy = dyson_reference(m, eta, mass, t, 6, 160);
    const EvolvedField coarse = solve_eta(m, eta, mass, t, t / 64);
    const EvolvedField fine = solve_eta(m, eta, mass, t, t / 128);
    double diff_c = 0.0, diff_f = 0.0, step_err = 0.0;
    for (std::int64_t f = 0; f < m.grid.total_points; ++f) {
      const Complex dv = dy.values[static_cast<std::size_t>(f)];
      diff_c = std::max(diff_c, std::abs(coarse.value_at(f) - dv));
      diff_f = std::max(diff_f, std::abs(fine.value_at(f) - dv));
      step_err = std::max(step_err, std::abs(coarse.value_at(f) - fine.value_at(f)));
    }
    const double bound = dy.truncation_bound + dy.quadrature_estimate + 2.0 * step_err + 1e-11;
    const double ratio = diff_c / std::max(diff_f, 1e-300);
    ratio_sum += ratio;
    os << "  case " << c << ": |split-dyson| " << diff_f << " bound " << bound
       << " dt-halving ratio " << ratio << "\n";
    ok = ok && diff_f <= bound && ratio > 2.0;
  }
  const double mean_ratio = ratio_sum / 10.0;
  os << "  mean halving ratio: " << mean_ratio << " (second order: ~4)\n";
  return ok && mean_ratio > 2.8 && mean_ratio < 5.7;
}

// --- 4. lemma A1 epsilon-path convergence -----------------------------------

bool crit_lemma_a1(std::ostream& os) {
  bool ok = true;
  for (int c = 0; c < 10; ++c) {
    RandomModelOptions opts;
    opts.max_modes = 3;
    const FieldModel m = random_model(4000 + static_cast<std::uint64_t>(c), opts);
    const int axis = c % monomial_count(m.mode_count);
    const SpaceTimeFn W = [&](const Point& x, double t) { return monomial_at(m, axis, x, t); };
    const TimeGrid ref = TimeGrid::make(1.0, 1024);
    const double target = sup_time_integral(W, m.grid, ref).value;

    double prev_gap = std::numeric_limits<double>::infinity();
    bool monotone = true;
    double final_gap = 0.0;
    for (int nt : {16, 64, 256}) {
      const TimeGrid tg = TimeGrid::make(1.0, nt);
      const SupIntegral si = sup_time_integral(W, m.grid, tg);
      const DiscretePath p = construct_epsilon_path(si.maximizers, m.grid.point(0), m.grid, tg);
      const double gap = target - path_time_integral(W, p);
      monotone = monotone && gap <= prev_gap + 1e-9;
      prev_gap = gap;
      final_gap = gap;
    }
    const double rel = std::abs(target) > 1e-12 ? final_gap / std::abs(target) : 0.0;
    os << "  functional " << c << " (axis " << axis << "): final gap " << final_gap
       << " rel " << rel << (monotone ? "" : " NOT MONOTONE") << "\n";
    ok = ok && monotone && rel <= 0.01;
  }
  return ok;
}

// --- 5. optimizer correctness -------------------------------------------------

bool crit_optimizer(std::ostream& os) {
  bool ok = true;

  // sphere-grid oracle agreement on 20 random M=2 models
  {
    double worst = 0.0;
    bool monotone = true;
    std::vector<double> errs(20);
    std::vector<int> mono(20, 1);
    parallel_for(20, 2, [&](std::int64_t c) {
      const FieldModel m = random_model(5000 + static_cast<std::uint64_t>(c));
      const TimeGrid tg = TimeGrid::make(1.0, 128);
      MuOptions mo;
      mo.seed = 50 + static_cast<std::uint64_t>(c);
      const MuResult res = mu_alternating(m, tg, mo);
      for (const auto& tr : res.all_traces)
        for (std::size_t i = 1; i < tr.size(); ++i)
          if (tr[i] < tr[i - 1] - 1e-12 * (1.0 + std::abs(tr[i - 1])))
            mono[static_cast<std::size_t>(c)] = 0;
      const double oracle = mu_oracle_sphere_grid(m, tg, 100);
      errs[static_cast<std::size_t>(c)] = std::abs(res.mu - oracle) / std::max(1e-12, res.mu);
      if (oracle > res.mu + 1e-9) mono[static_cast<std::size_t>(c)] = 0;
    });
    for (int c = 0; c < 20; ++c) {
      worst = std::max(worst, errs[static_cast<std::size_t>(c)]);
      monotone = monotone && mono[static_cast<std::size_t>(c)] == 1;
    }
    os << "  oracle max rel gap over 20 models: " << worst
       << (monotone ? "" : " (monotonicity violated)") << "\n";
    ok = ok && worst <= 1e-3 && monotone;
  }

  // two-beamlet closed form
  {
    const double t = 1.0, a = 1.3;
    const FieldModel m = two_equal_beamlets(a);
    const TimeGrid tg = TimeGrid::make(t, 4096);
    MuOptions mo;
    mo.n_starts = 4;
    const double mu = mu_alternating(m, tg, mo).mu;
    const double mu1 = integrated_gamma(m, m.grid.point(0), tg).eigenvalues_descending()(0);
    const double mu1_exact = 0.5 * (t + std::abs(2.0 * std::sin(0.5 * a * t) / a));
    os << "  closed form: mu " << mu << " (exact " << t << "), mu1 " << mu1 << " (exact "
       << mu1_exact << ")\n";
    ok = ok && std::abs(mu - t) < 1e-6 * t && std::abs(mu1 - mu1_exact) < 1e-6 * mu1_exact;
  }
  return ok;
}

// --- 6. covariance eigenvalue correspondence ----------------------------------

bool crit_eigen_correspondence(std::ostream& os) {
  bool ok = true;
  for (int c = 0; c < 10; ++c) {
    RandomModelOptions opts;
    opts.max_modes = 3;
    const FieldModel m = random_model(6000 + static_cast<std::uint64_t>(c), opts);
    const double t = 1.0;

    // smooth random closed curve sampled on a dense path grid
    const std::uint64_t ps = rng::substream(600, static_cast<std::uint64_t>(c));
    DiscretePath path;
    path.tgrid = TimeGrid::make(t, 8192);
    path.grid = m.grid;
    path.points.resize(8193);
    for (int j = 0; j <= 8192; ++j) {
      const double tau = t * j / 8192.0;
      Point x{0, 0, 0};
      for (int a = 0; a < m.grid.dim; ++a) {
        double v = rng::uniform01(ps, static_cast<std::uint64_t>(a) + 10) * m.grid.lengths[a];
        for (int h = 1; h <= 3; ++h)
          v += 0.2 * m.grid.lengths[a] * rng::uniform01(ps, 20 + 10 * h + a) *
               std::sin(2.0 * M_PI * h * tau / t + 6.28 * rng::uniform01(ps, 50 + 10 * h + a));
        x[a] = v;
      }
      path.points[static_cast<std::size_t>(j)] = m.grid.wrap(x);
    }

    const Eigen::VectorXd ref =
        integrated_gamma(m, path, TimeGrid::make(t, 8192)).eigenvalues_descending();
    auto err_at = [&](int K) {
      const CovarianceSpectrum sp = nystrom_covariance_eigs(m, path, K);
      double e = 0.0;
      for (int i = 0; i < m.mode_count; ++i)
        e = std::max(e, std::abs(sp.eigenvalues(i) - ref(i)));
      return e;
    };
    const double e64 = err_at(64), e128 = err_at(128), e256 = err_at(256);
    const double scale = std::max(1e-12, ref(0));
    if (e256 <= 1e-10 * scale) {
      os << "  path " << c << ": already converged (err " << e256 << ")\n";
      continue;
    }
    const double order = 0.5 * std::log2(e64 / std::max(e256, 1e-300));
    os << "  path " << c << ": err(64) " << e64 << " err(128) " << e128 << " err(256) " << e256
       << " order " << order << "\n";
    ok = ok && order > 1.5 && order < 2.6 && e256 < e64;
  }
  return ok;
}

// --- 7. proposition inequality -------------------------------------------------

bool crit_proposition(std::ostream& os) {
  std::vector<int> pass(50, 0);
  parallel_for(50, 2, [&](std::int64_t c) {
    RandomModelOptions opts;
    opts.min_modes = 1;
    opts.max_modes = 3;
    opts.max_dim = 2;
    const FieldModel m = random_model(7000 + static_cast<std::uint64_t>(c), opts);
    const TimeGrid tg = TimeGrid::make(1.0, 96);
    MuOptions mo;
    mo.n_starts = 6;
    mo.seed = 70 + static_cast<std::uint64_t>(c);
    bool all_ok = true;
    try {
      for (int q : {1, 2, 3}) {
        const CriticalReport rep = critical_report(m, tg, q, m.grid.point(0), mo);
        all_ok = all_ok && rep.lambda_q <= rep.lambda_bar_q + 1e-10;
      }
    } catch (const std::exception&) {
      all_ok = false;  // critical_report throws on inequality violation
    }
    pass[static_cast<std::size_t>(c)] = all_ok ? 1 : 0;
  });
  int n_pass = 0;
  for (int v : pass) n_pass += v;
  os << "  inequality held on " << n_pass << "/50 random models, q in {1,2,3}\n";

  // equality case: single uniform beamlet
  const FieldModel m1 = uniform_beamlet();
  MuOptions mo;
  mo.n_starts = 2;
  const CriticalReport r1 = critical_report(m1, TimeGrid::make(1.0, 128), 2, m1.grid.point(0), mo);
  const bool equal = std::abs(r1.ratio - 1.0) < 1e-10;
  os << "  M=1 equality: ratio " << r1.ratio << "\n";
  return n_pass == 50 && equal;
}

// --- 8. growth slopes ------------------------------------------------------------

bool crit_growth_slopes(std::ostream& os) {
  bool ok = true;
  const double t = 2.0, lambda = 0.05;
  const FieldModel m = two_equal_beamlets(1.0);
  const TimeGrid tg = TimeGrid::make(t, 256);
  MuOptions mo;
  mo.n_starts = 4;
  const MuResult mu = mu_alternating(m, tg, mo);
  const double target = lambda * mu.mu;

  std::vector<double> radii;
  const double r2max = 48.0 / (lambda * mu.mu);
  for (int i = 5; i >= 0; --i) radii.push_back(std::sqrt(r2max * std::pow(2.0, -i)));

  // (a) diffusive m = i
  {
    const SlopeFit fit = growth_slope(m, ComplexMass::finite({0.0, 1.0}), lambda, mu.sigma_star,
                                      radii, m.grid.point(0), t);
    const double rel = std::abs(fit.slope - target) / target;
    os << "  diffusive slope " << fit.slope << " vs lambda*mu " << target << " rel " << rel
       << "\n";
    ok = ok && rel <= 0.05 && fit.slope <= target * (1.0 + 1e-6);
  }

  // (b) diffractive m = 1: envelope fit with convergence diagnostics
  {
    LadderOptions lo;
    lo.envelope = true;
    const SlopeFit fit = growth_slope(m, ComplexMass::finite({1.0, 0.0}), lambda, mu.sigma_star,
                                      radii, m.grid.point(0), t, lo);
    const double rel = std::abs(fit.slope - target) / target;
    os << "  diffractive envelope slope " << fit.slope << " rel " << rel
       << (fit.flagged ? " [fit flagged]" : "") << "\n";
    os << "    rung slopes:";
    for (std::size_t i = 1; i < fit.radii.size(); ++i)
      os << " " << (fit.log_moduli[i] - fit.log_moduli[i - 1]) /
                       (fit.radii[i] * fit.radii[i] - fit.radii[i - 1] * fit.radii[i - 1]);
    os << "\n";
    ok = ok && rel <= 0.10;
  }

  // (c) uniform beamlet exact for every regime
  {
    const FieldModel m1 = uniform_beamlet();
    Eigen::VectorXcd e1(1);
    e1 << 1.0;
    double worst = 0.0;
    for (ComplexMass mass : {ComplexMass::finite({0.0, 1.0}), ComplexMass::finite({1.0, 0.0}),
                             ComplexMass::finite({1.0, 1.0}), ComplexMass::infinite_mass()}) {
      const SlopeFit fit = growth_slope(m1, mass, 0.6, Direction::make(e1),
                                        {0.5, 1.0, 2.0, 4.0, 8.0}, m1.grid.point(0), 1.0);
      worst = std::max(worst, std::abs(fit.slope - 0.6) / 0.6);
    }
    os << "  uniform-beamlet slope max rel err: " << worst << "\n";
    ok = ok && worst < 1e-9;
  }
  return ok;
}

// --- 9. paley-wiener bound ---------------------------------------------------------

bool crit_paley_wiener(std::ostream& os) {
  bool all_ok = true;
  const ComplexMass mass = ComplexMass::finite({0.0, 4.0});
  for (int c = 0; c < 5; ++c) {
    RandomModelOptions opts;
    opts.max_index = 1;  // keeps the maximizer drift gentle on the rho ladder
    const FieldModel m = random_model(9000 + static_cast<std::uint64_t>(c), opts);
    const TimeGrid tg = TimeGrid::make(1.0, 128);
    const int N = monomial_count(m.mode_count);
    std::vector<int> axis_ok(static_cast<std::size_t>(N), 0);
    std::vector<std::string> lines(static_cast<std::size_t>(N));
    parallel_for(N, 2, [&](std::int64_t axis) {
      std::vector<double> rho;
      for (int i = 0; i < 7; ++i) rho.push_back(50.0 * std::pow(2.0, 0.5 * i));
      std::ostringstream ls;
      try {
        const PaleyWienerReport rep =
            paley_wiener_check(m, mass, tg, static_cast<int>(axis), rho, m.grid.point(0));
        // endpoint convergence measured at the top of the ladder
        const std::size_t R = rep.rho.size();
        const double top_slope = (rep.log_mod_plus[R - 1] - rep.log_mod_plus[R - 2]) /
                                 (rep.rho[R - 1] - rep.rho[R - 2]);
        const double rel = std::abs(top_slope - rep.b) / std::max(1e-12, std::abs(rep.b));
        const bool centered_ok = rep.centered_slope_plus <= rep.kappa + 1e-3 &&
                                 rep.centered_slope_minus <= rep.kappa + 1e-3;
        ls << "    axis " << axis << ": kappa " << rep.kappa << " centered slopes ("
           << rep.centered_slope_plus << ", " << rep.centered_slope_minus << ") b " << rep.b
           << " top slope " << top_slope << " rel " << rel;
        axis_ok[static_cast<std::size_t>(axis)] = (centered_ok && rel <= 0.02) ? 1 : 0;
      } catch (const std::exception& e) {
        ls << "    axis " << axis << ": " << e.what();
        axis_ok[static_cast<std::size_t>(axis)] = 0;
      }
      lines[static_cast<std::size_t>(axis)] = ls.str();
    });
    os << "  model " << c << ":\n";
    for (int axis = 0; axis < N; ++axis) {
      os << lines[static_cast<std::size_t>(axis)] << "\n";
      all_ok = all_ok && axis_ok[static_cast<std::size_t>(axis)] == 1;
    }
  }
  return all_ok;
}

// --- 10. moment baseline --------------------------------------------------------------

bool crit_moment_baseline(std::ostream& os) {
  const FieldModel m = two_equal_beamlets(0.8);
  const TimeGrid tg = TimeGrid::make(1.0, 256);
  const Eigen::VectorXd eigs = integrated_gamma(m, m.grid.point(0), tg).eigenvalues_descending();
  const int q = 2;
  const double lambda = 0.5 / (q * eigs(0));
  const FreeMoment ref = closed_form_free_moment(eigs, q, lambda);
  McOptions mo;
  mo.threads = 2;
  const MomentEstimate est = mc_moment(m, ComplexMass::infinite_mass(), lambda, q,
                                       m.grid.point(0), tg, 100000, 2024, mo);
  const double dev = std::abs(est.mean - ref.value) / std::max(est.std_error, 1e-300);
  os << "  mc mean " << est.mean << " +- " << est.std_error << " closed form " << ref.value
     << " deviation " << dev << " sigma\n";
  return est.finite_flag && dev <= 3.0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<Criterion> criteria = {
      {1, "monomial-identity", crit_monomial_identity},
      {2, "solver-identities", crit_solver_identities},
      {3, "dyson-oracle", crit_dyson_oracle},
      {4, "lemma-a1-paths", crit_lemma_a1},
      {5, "optimizer-correctness", crit_optimizer},
      {6, "eigenvalue-correspondence", crit_eigen_correspondence},
      {7, "proposition-inequality", crit_proposition},
      {8, "lemma-2-slopes", crit_growth_slopes},
      {9, "paley-wiener-bound", crit_paley_wiener},
      {10, "moment-baseline", crit_moment_baseline},
  };

  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    std::ostringstream detail;
    const auto start = std::chrono::steady_clock::now();
    bool pass = false;
    try {
      pass = c.run(detail);
    } catch (const std::exception& e) {
      detail << "  exception: " << e.what() << "\n";
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %02d %s (%.1f s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs);
    std::fputs(detail.str().c_str(), stdout);
    if (!pass) ++failures;
  }
  return failures;
}
