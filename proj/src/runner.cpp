#include "ampcrit/runner.hpp"

#include <cmath>
#include <cstdlib>
#include <functional>
#include <sstream>

#include "ampcrit/config.hpp"
#include "ampcrit/divergence_lab.hpp"
#include "ampcrit/fft.hpp"
#include "ampcrit/io.hpp"
#include "ampcrit/model_zoo.hpp"
#include "ampcrit/parallel.hpp"
#include "ampcrit/rng.hpp"
#include "json.hpp"

namespace ampcrit {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string resolve_out_dir(const RunnerOptions& opts, const RunConfig& rc) {
  if (!opts.out_dir.empty()) return opts.out_dir;
  if (!rc.output_dir.empty()) return rc.output_dir;
  if (const char* env = std::getenv("AMPCRIT_OUT"); env && *env) return env;
  return "ampcrit-out";
}

struct RunContext {
  RunConfig cfg;
  std::string out_dir;
  RunManifest manifest;

  void add_output(const std::string& name) { manifest.output_files.push_back(name); }
  std::string path(const std::string& name) const { return out_dir + "/" + name; }
  void finish() {
    manifest.finished_utc = utc_timestamp();
    manifest.write(out_dir);
  }
};

MuOptions mu_options(const RunConfig& rc) {
  MuOptions mo;
  mo.n_starts = rc.optimizer.starts;
  mo.max_iters = rc.optimizer.max_iters;
  mo.tol = rc.optimizer.tol;
  mo.seed = rc.seed;
  mo.threads = rc.threads;
  mo.anchor = rc.experiment.probe;
  return mo;
}

std::vector<std::string> index_header(const TorusGrid& grid) {
  std::vector<std::string> h;
  for (int a = 0; a < grid.dim; ++a) h.push_back("i" + std::to_string(a));
  return h;
}

int cmd_simulate(RunContext& ctx, std::ostream& out) {
  const RunConfig& rc = ctx.cfg;
  const GaussianDraw draw =
      sample_gaussian(rc.model, rng::substream(rc.seed, 0), rc.experiment.sample_index);
  const EvolvedField field = solve_amplifier(rc.model, draw, rc.mass, rc.experiment.lambda,
                                             rc.horizon, rc.dt);

  std::vector<std::string> header = index_header(rc.model.grid);
  header.insert(header.end(), {"re", "im", "log_scale"});
  CsvWriter csv(ctx.path("snapshot.csv"), header);
  for (std::int64_t f = 0; f < rc.model.grid.total_points; ++f) {
    const auto idx = rc.model.grid.unflatten(f);
    std::vector<std::string> cells;
    for (int a = 0; a < rc.model.grid.dim; ++a) cells.push_back(std::to_string(idx[a]));
    const Complex v = field.values[static_cast<std::size_t>(f)];
    cells.push_back(csv_cell(v.real()));
    cells.push_back(csv_cell(v.imag()));
    cells.push_back(csv_cell(field.log_scale));
    csv.row(cells);
  }
  csv.close();
  ctx.add_output("snapshot.csv");
  out << "simulate: t=" << format_real(field.time) << " steps=" << field.step_count
      << " log_scale=" << format_real(field.log_scale) << "\n";
  return 0;
}

nlohmann::json direction_json(const Direction& d) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Eigen::Index n = 0; n < d.sigma.size(); ++n) {
    re.push_back(d.sigma(n).real());
    im.push_back(d.sigma(n).imag());
  }
  return {{"re", re}, {"im", im}};
}

int cmd_mu(RunContext& ctx, std::ostream& out) {
  const RunConfig& rc = ctx.cfg;
  const TimeGrid tgrid = rc.tgrid();
  const MuResult res = mu_alternating(rc.model, tgrid, mu_options(rc));

  nlohmann::json j;
  j["mu"] = res.mu;
  j["sigma_star"] = direction_json(res.sigma_star);
  j["trace"] = res.trace;
  j["starts_used"] = res.starts_used;
  j["converged"] = res.converged;
  j["start_values"] = res.start_values;
  write_text_atomic(ctx.path("mu.json"), j.dump(2) + "\n");
  ctx.add_output("mu.json");

  // Optimal per-slice maximizer profile as a path table.
  std::vector<std::string> header{"tau"};
  for (int a = 0; a < rc.model.grid.dim; ++a) header.push_back("x" + std::to_string(a));
  CsvWriter csv(ctx.path("mu_path.csv"), header);
  for (int s = 0; s < tgrid.slices; ++s) {
    std::vector<std::string> cells{csv_cell(tgrid.midpoint(s))};
    for (int a = 0; a < rc.model.grid.dim; ++a)
      cells.push_back(csv_cell(res.slice_maximizers[static_cast<std::size_t>(s)][a]));
    csv.row(cells);
  }
  csv.close();
  ctx.add_output("mu_path.csv");
  out << "mu: " << format_real(res.mu) << " (starts=" << res.starts_used
      << ", converged=" << (res.converged ? "yes" : "no") << ")\n";
  return 0;
}

int cmd_critical(RunContext& ctx, std::ostream& out) {
  const RunConfig& rc = ctx.cfg;
  const TimeGrid tgrid = rc.tgrid();
  const CriticalReport rep =
      critical_report(rc.model, tgrid, rc.experiment.q, rc.experiment.probe, mu_options(rc));

  nlohmann::json j;
  j["q"] = rep.q;
  j["mu_xt"] = rep.mu_xt;
  j["lambda_q"] = rep.lambda_q;
  j["mu1_const"] = rep.mu1_const;
  j["lambda_bar_q"] = rep.lambda_bar_q;
  j["ratio"] = rep.ratio;
  write_text_atomic(ctx.path("critical.json"), j.dump(2) + "\n");
  ctx.add_output("critical.json");

  CsvWriter csv(ctx.path("critical.csv"),
                {"q", "mu_xt", "lambda_q", "mu1_const", "lambda_bar_q", "ratio"});
  csv.row({csv_cell(static_cast<std::int64_t>(rep.q)), csv_cell(rep.mu_xt), csv_cell(rep.lambda_q),
           csv_cell(rep.mu1_const), csv_cell(rep.lambda_bar_q), csv_cell(rep.ratio)});
  csv.close();
  ctx.add_output("critical.csv");

  // Spectra backing the two couplings: the covariance spectrum at the fixed
  // probe and the integrated-gamma spectrum along the optimal profile.
  const CovarianceSpectrum spec = nystrom_covariance_eigs(rc.model, rc.experiment.probe,
                                                          rc.horizon, rc.optimizer.nystrom_k);
  CsvWriter sfix(ctx.path("spectrum_fixed.csv"), {"index", "eigenvalue"});
  for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i)
    sfix.row({csv_cell(static_cast<std::int64_t>(i)), csv_cell(spec.eigenvalues(i))});
  sfix.close();
  ctx.add_output("spectrum_fixed.csv");

  const MuResult mu = mu_alternating(rc.model, tgrid, mu_options(rc));
  const Eigen::VectorXd opt_eigs =
      integrated_gamma_profile(rc.model, mu.slice_maximizers, tgrid).eigenvalues_descending();
  CsvWriter sopt(ctx.path("spectrum_optimal.csv"), {"index", "eigenvalue"});
  for (Eigen::Index i = 0; i < opt_eigs.size(); ++i)
    sopt.row({csv_cell(static_cast<std::int64_t>(i)), csv_cell(opt_eigs(i))});
  sopt.close();
  ctx.add_output("spectrum_optimal.csv");

  out << "critical: lambda_q=" << format_real(rep.lambda_q)
      << " lambda_bar_q=" << format_real(rep.lambda_bar_q) << " ratio=" << format_real(rep.ratio)
      << "\n";
  return 0;
}

int cmd_slope(RunContext& ctx, std::ostream& out) {
  const RunConfig& rc = ctx.cfg;
  const TimeGrid tgrid = rc.tgrid();
  const MuResult mu = mu_alternating(rc.model, tgrid, mu_options(rc));
  const double lambda = rc.experiment.lambda;

  std::vector<double> radii = rc.experiment.radii;
  if (radii.empty()) {
    // geometric ladder in r^2 up to lambda r^2 mu ~ 48
    const double r2max = 48.0 / (lambda * mu.mu);
    for (int i = 7; i >= 0; --i) radii.push_back(std::sqrt(r2max * std::pow(2.0, -i * 0.5)));
    std::sort(radii.begin(), radii.end());
  }

  LadderOptions lo;
  lo.envelope = rc.mass.regime() == ComplexMass::Regime::diffractive;
  const SlopeFit fit = growth_slope(rc.model, rc.mass, lambda, mu.sigma_star, radii,
                                    rc.experiment.probe, rc.horizon, lo);

  CsvWriter csv(ctx.path("slope_ladder.csv"), {"r", "r2", "log_mod", "fit_slope"});
  for (std::size_t i = 0; i < fit.radii.size(); ++i) {
    const double run_slope =
        i == 0 ? std::numeric_limits<double>::quiet_NaN()
               : (fit.log_moduli[i] - fit.log_moduli[i - 1]) /
                     (fit.radii[i] * fit.radii[i] - fit.radii[i - 1] * fit.radii[i - 1]);
    csv.row({csv_cell(fit.radii[i]), csv_cell(fit.radii[i] * fit.radii[i]),
             csv_cell(fit.log_moduli[i]), csv_cell(run_slope)});
  }
  csv.close();
  ctx.add_output("slope_ladder.csv");

  nlohmann::json j;
  j["lambda"] = lambda;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["confidence_halfwidth"] = fit.confidence_halfwidth;
  j["flagged"] = fit.flagged;
  j["lambda_mu"] = lambda * mu.mu;
  j["envelope_fit"] = lo.envelope;
  write_text_atomic(ctx.path("slope.json"), j.dump(2) + "\n");
  ctx.add_output("slope.json");

  out << "slope: " << format_real(fit.slope) << " vs lambda*mu=" << format_real(lambda * mu.mu)
      << (fit.flagged ? " [flagged]" : "") << "\n";
  return 0;
}

int cmd_scan(RunContext& ctx, std::ostream& out) {
  const RunConfig& rc = ctx.cfg;
  const TimeGrid tgrid = rc.tgrid();
  std::vector<double> grid = rc.experiment.lambda_grid;
  if (grid.empty()) throw ConfigError("[experiment] lambda_grid is required for scan", 0);

  ScanOptions so;
  so.mc_samples = rc.experiment.samples;
  so.stream_seed = rng::substream(rc.seed, 2);
  so.mc.threads = rc.threads;
  so.mc.mu = mu_options(rc);
  const ScanResult res =
      lambda_scan(rc.model, rc.mass, rc.experiment.q, grid, rc.experiment.probe, tgrid, so);

  CsvWriter csv(ctx.path("scan.csv"), {"lambda", "qlmu", "class_prop", "class_free", "mean", "stderr"});
  for (const ScanRow& row : res.rows) {
    csv.row({csv_cell(row.lambda), csv_cell(row.qlmu),
             row.divergent_prop ? "divergent" : "finite",
             row.divergent_free ? "divergent" : "finite",
             row.has_mc ? csv_cell(row.mc.mean) : "nan",
             row.has_mc ? csv_cell(row.mc.std_error) : "nan"});
  }
  csv.close();
  ctx.add_output("scan.csv");

  nlohmann::json j;
  j["q"] = rc.experiment.q;
  j["mu_xt"] = res.mu_xt;
  j["mu1_const"] = res.mu1_const;
  j["lambda_q"] = 1.0 / (rc.experiment.q * res.mu_xt);
  j["lambda_bar_q"] = 1.0 / (rc.experiment.q * res.mu1_const);
  write_text_atomic(ctx.path("scan.json"), j.dump(2) + "\n");
  ctx.add_output("scan.json");

  out << "scan: " << res.rows.size() << " points, window [" << format_real(1.0 / (rc.experiment.q * res.mu_xt))
      << ", " << format_real(1.0 / (rc.experiment.q * res.mu1_const)) << "]\n";
  return 0;
}

// ---------------------------------------------------------------------------
// verify: named invariant battery over the configured model plus canonical
// cases. Prints one line per property; exit 1 names the failures.
// ---------------------------------------------------------------------------

struct Check {
  std::string name;
  std::function<bool(std::string&)> fn;  // fills a detail string
};

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

int cmd_verify(RunContext& ctx, std::ostream& out) {
  const RunConfig& rc = ctx.cfg;
  const FieldModel& model = rc.model;
  const std::uint64_t seed = rc.seed;
  std::vector<Check> checks;

  checks.push_back({"normalization-integral", [&](std::string& d) {
    const double v = normalization_integral(model);
    d = "value " + format_real(v);
    return std::abs(v - 1.0) <= 1e-12;
  }});

  checks.push_back({"monomial-identity", [&](std::string& d) {
    double worst = 0.0;
    const std::uint64_t s2 = rng::substream(seed, 10);
    for (int trial = 0; trial < 200; ++trial) {
      const GaussianDraw draw = sample_gaussian(model, s2, static_cast<std::uint64_t>(trial));
      const double tau = rng::uniform01(s2, 100000 + trial) * rc.horizon;
      Point x{0, 0, 0};
      for (int a = 0; a < model.grid.dim; ++a)
        x[a] = rng::uniform01(s2, 200000 + 3 * trial + a) * model.grid.lengths[a];
      const Eigen::VectorXd phi = monomials(model, x, tau);
      const double lhs = phi.dot(draw.k_vector);
      const double rhs = std::norm(eval_field(model, draw, x, tau));
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, rhs));
      const double knorm = draw.k_vector.norm();
      worst = std::max(worst, std::abs(knorm - draw.norm_s * draw.norm_s) /
                                  std::max(1.0, knorm));
    }
    d = "max rel err " + format_real(worst);
    return worst < 1e-11;
  }});

  checks.push_back({"gamma-rank-one-psd", [&](std::string& d) {
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const double tau = rng::uniform01(seed, 300000 + trial) * rc.horizon;
      const Point x = model.grid.point(trial % model.grid.total_points);
      const HermitianForm g = gamma_at(model, x, tau);
      const Eigen::VectorXd ev = g.eigenvalues_descending();
      const double n2 = model.beamlets_at(x, tau).squaredNorm();
      worst = std::max(worst, std::abs(ev(0) - n2));
      if (ev.size() > 1) worst = std::max(worst, std::abs(ev(ev.size() - 1)));
      worst = std::max(worst, (g.entries - g.entries.adjoint()).cwiseAbs().maxCoeff());
    }
    d = "max defect " + format_real(worst);
    return worst < 1e-12;
  }});

  checks.push_back({"sampling-determinism", [&](std::string& d) {
    const GaussianDraw a = sample_gaussian(model, seed, 7);
    const GaussianDraw b = sample_gaussian(model, seed, 7);
    const GaussianDraw c = sample_gaussian(model, seed, 8);
    d = "";
    return a.s == b.s && a.s != c.s;
  }});

  checks.push_back({"free-propagator-stability", [&](std::string& d) {
    if (rc.mass.infinite) {
      d = "infinite mass: free step is the identity";
      return true;
    }
    const auto k2 = wavenumber_squares(model.grid);
    double worst = 0.0;
    const Complex factor = Complex(0.0, -1.0) * rc.dt / (2.0 * rc.mass.value);
    for (double v : k2) worst = std::max(worst, std::abs(std::exp(factor * v)));
    d = "max |multiplier| " + format_real(worst);
    return worst <= 1.0 + 1e-12;
  }});

  checks.push_back({"uniform-beamlet-exact", [&](std::string& d) {
    const FieldModel m1 = uniform_beamlet();
    Eigen::VectorXcd s(1);
    s(0) = M_SQRT2;
    const GaussianDraw draw = GaussianDraw::from_amplitudes(s);
    const double lambda = 1.5, t = 1.0;  // lambda |s|^2 t = 3
    double worst = 0.0;
    for (ComplexMass mass : {ComplexMass::finite({0.0, 1.0}), ComplexMass::finite({1.0, 0.0}),
                             ComplexMass::finite({1.0, 1.0}), ComplexMass::infinite_mass()}) {
      const EvolvedField f = solve_amplifier(m1, draw, mass, lambda, t, t / 512);
      worst = std::max(worst, std::abs(f.log_abs_at(0) - 3.0) / 3.0);
    }
    d = "max rel err " + format_real(worst);
    return worst < 1e-10;
  }});

  checks.push_back({"eta-identity", [&](std::string& d) {
    const ComplexMass mass = rc.mass.infinite ? ComplexMass::finite({0.0, 1.0}) : rc.mass;
    const GaussianDraw draw = sample_gaussian(model, rng::substream(seed, 11), 0);
    const double lambda = rc.experiment.lambda;
    const EvolvedField e = solve_amplifier(model, draw, mass, lambda, rc.horizon, rc.dt);
    const Eigen::VectorXcd eta = Complex(0.0, lambda) * draw.k_vector;
    const EvolvedField p = solve_eta(model, eta, mass, rc.horizon, rc.dt);
    double worst = 0.0;
    for (std::int64_t f = 0; f < model.grid.total_points; ++f)
      worst = std::max(worst, std::abs(e.log_abs_at(f) - p.log_abs_at(f)) /
                                  std::max(1.0, std::abs(e.log_abs_at(f))));
    d = "max rel log err " + format_real(worst);
    return worst < 1e-9;
  }});

  checks.push_back({"real-potential-unitarity", [&](std::string& d) {
    const ComplexMass mass = ComplexMass::finite({1.0, 0.0});
    const std::uint64_t s2 = rng::substream(seed, 12);
    Eigen::VectorXcd eta(monomial_count(model.mode_count));
    for (Eigen::Index i = 0; i < eta.size(); ++i)
      eta(i) = Complex(2.0 * rng::uniform01(s2, static_cast<std::uint64_t>(i)) - 1.0, 0.0);
    const EvolvedField p = solve_eta(model, eta, mass, rc.horizon, rc.dt);
    const double drift = std::abs(p.log_l2_norm() - 0.5 * std::log(model.grid.volume()));
    d = "log norm drift " + format_real(drift);
    return drift <= 1e-10 * (1.0 + rc.horizon);
  }});

  checks.push_back({"dyson-consistency", [&](std::string& d) {
    const ComplexMass mass = rc.mass.infinite ? ComplexMass::finite({0.0, 1.0}) : rc.mass;
    const std::uint64_t s2 = rng::substream(seed, 13);
    Eigen::VectorXcd eta(monomial_count(model.mode_count));
    for (Eigen::Index i = 0; i < eta.size(); ++i)
      eta(i) = Complex(rng::uniform01(s2, 2 * static_cast<std::uint64_t>(i)) - 0.5,
                       rng::uniform01(s2, 2 * static_cast<std::uint64_t>(i) + 1) - 0.5);
    const double t = 0.05;
    const DysonResult dy = dyson_reference(model, eta, mass, t, 6, 128);
    const EvolvedField coarse = solve_eta(model, eta, mass, t, t / 64);
    const EvolvedField fine = solve_eta(model, eta, mass, t, t / 128);
    double step_err = 0.0, diff = 0.0;
    for (std::int64_t f = 0; f < model.grid.total_points; ++f) {
      step_err = std::max(step_err, std::abs(coarse.value_at(f) - fine.value_at(f)));
      diff = std::max(diff, std::abs(fine.value_at(f) - dy.values[static_cast<std::size_t>(f)]));
    }
    const double bound = dy.truncation_bound + dy.quadrature_estimate + 2.0 * step_err + 1e-10;
    d = "diff " + format_real(diff) + " bound " + format_real(bound);
    return diff <= bound;
  }});

  checks.push_back({"lemma-a1-path-convergence", [&](std::string& d) {
    const int axis = monomial_count(model.mode_count) - 1;
    const SpaceTimeFn W = [&](const Point& x, double tau) {
      return monomial_at(model, axis, x, tau);
    };
    const TimeGrid ref = TimeGrid::make(rc.horizon, 1024);
    const double target = sup_time_integral(W, model.grid, ref).value;
    double prev_gap = std::numeric_limits<double>::infinity();
    bool monotone = true;
    double final_gap = 0.0;
    for (int nt : {16, 64, 256}) {
      const TimeGrid tg = TimeGrid::make(rc.horizon, nt);
      const SupIntegral si = sup_time_integral(W, model.grid, tg);
      const DiscretePath path =
          construct_epsilon_path(si.maximizers, model.grid.point(0), model.grid, tg);
      const double gap = target - path_time_integral(W, path);
      if (gap > prev_gap + 1e-9) monotone = false;
      prev_gap = gap;
      final_gap = gap;
    }
    d = "final gap " + format_real(final_gap) + " of " + format_real(target);
    return monotone && final_gap <= 0.01 * std::abs(target);
  }});

  checks.push_back({"kappa-shift-invariance", [&](std::string& d) {
    const int axis = monomial_count(model.mode_count) - 1;
    const TimeGrid tg = TimeGrid::make(rc.horizon, 128);
    auto kappa_of = [&](double shift) {
      const SpaceTimeFn up = [&](const Point& x, double tau) {
        return monomial_at(model, axis, x, tau) + shift;
      };
      const SpaceTimeFn dn = [&](const Point& x, double tau) {
        return -(monomial_at(model, axis, x, tau) + shift);
      };
      const double b = sup_time_integral(up, model.grid, tg).value;
      const double a = -sup_time_integral(dn, model.grid, tg).value;
      return 0.5 * (b - a);
    };
    const double k0 = kappa_of(0.0), k17 = kappa_of(17.0);
    d = "kappa " + format_real(k0) + " shifted " + format_real(k17);
    return std::abs(k0 - k17) <= 1e-9 * (1.0 + std::abs(k0));
  }});

  checks.push_back({"alternating-monotone-trace", [&](std::string& d) {
    MuOptions mo = mu_options(rc);
    mo.n_starts = std::min(mo.n_starts, 4);
    const TimeGrid tg = TimeGrid::make(rc.horizon, 128);
    const MuResult res = mu_alternating(model, tg, mo);
    for (const auto& trace : res.all_traces)
      for (std::size_t i = 1; i < trace.size(); ++i)
        if (trace[i] < trace[i - 1] - 1e-12 * (1.0 + std::abs(trace[i - 1]))) {
          d = "decrease at iteration " + std::to_string(i);
          return false;
        }
    d = "mu " + format_real(res.mu);
    return true;
  }});

  checks.push_back({"mu-vs-sphere-oracle", [&](std::string& d) {
    if (model.mode_count > 2) {
      d = "skipped: oracle regime is M <= 2";
      return true;
    }
    const TimeGrid tg = TimeGrid::make(rc.horizon, 128);
    MuOptions mo = mu_options(rc);
    const double mu = mu_alternating(model, tg, mo).mu;
    const double oracle = mu_oracle_sphere_grid(model, tg, rc.optimizer.sphere_resolution);
    d = "mu " + format_real(mu) + " oracle " + format_real(oracle);
    return oracle <= mu + 1e-9 && rel_close(mu, oracle, 1e-3);
  }});

  checks.push_back({"nystrom-gamma-correspondence", [&](std::string& d) {
    const TimeGrid tg = TimeGrid::make(rc.horizon, 2048);
    const Eigen::VectorXd ge =
        integrated_gamma(model, rc.experiment.probe, tg).eigenvalues_descending();
    auto err_at = [&](int K) {
      const CovarianceSpectrum sp =
          nystrom_covariance_eigs(model, rc.experiment.probe, rc.horizon, K);
      double e = 0.0;
      for (int i = 0; i < model.mode_count; ++i) e = std::max(e, std::abs(sp.eigenvalues(i) - ge(i)));
      return e;
    };
    const double e64 = err_at(64), e128 = err_at(128);
    d = "err(64) " + format_real(e64) + " err(128) " + format_real(e128);
    return e128 <= 1e-3 * std::max(1.0, ge(0)) && (e128 <= e64 / 2.0 + 1e-12);
  }});

  checks.push_back({"proposition-inequality", [&](std::string& d) {
    const TimeGrid tg = rc.tgrid();
    const CriticalReport rep =
        critical_report(model, tg, rc.experiment.q, rc.experiment.probe, mu_options(rc));
    const CriticalReport rep2 =
        critical_report(model, tg, 2 * rc.experiment.q, rc.experiment.probe, mu_options(rc));
    d = "lambda_q " + format_real(rep.lambda_q) + " <= lambda_bar_q " +
        format_real(rep.lambda_bar_q);
    return rep.lambda_q <= rep.lambda_bar_q + 1e-10 &&
           rel_close(rep2.lambda_q, 0.5 * rep.lambda_q, 1e-12);
  }});

  checks.push_back({"free-moment-mc-consistency", [&](std::string& d) {
    const TimeGrid tg = TimeGrid::make(rc.horizon, 256);
    const Eigen::VectorXd eigs =
        integrated_gamma(model, rc.experiment.probe, tg).eigenvalues_descending();
    const int q = rc.experiment.q;
    const double lambda = 0.4 / (q * eigs(0));
    const FreeMoment ref = closed_form_free_moment(eigs, q, lambda);
    McOptions mo;
    mo.threads = rc.threads;
    const MomentEstimate est = mc_moment(model, ComplexMass::infinite_mass(), lambda, q,
                                         rc.experiment.probe, tg, 20000,
                                         rng::substream(seed, 14), mo);
    d = "mc " + format_real(est.mean) + " ref " + format_real(ref.value);
    return est.finite_flag && std::abs(est.mean - ref.value) <= 4.0 * est.std_error;
  }});

  // Bounds table export for the configured model.
  {
    const TimeGrid tg = TimeGrid::make(rc.horizon, std::min(rc.optimizer.time_slices, 128));
    const PathBounds pb = bounds_and_centering(model, tg);
    CsvWriter csv(ctx.path("bounds.csv"), {"i", "a", "b", "c", "kappa"});
    for (Eigen::Index i = 0; i < pb.a.size(); ++i)
      csv.row({csv_cell(static_cast<std::int64_t>(i)), csv_cell(pb.a(i)), csv_cell(pb.b(i)),
               csv_cell(pb.c(i)), csv_cell(pb.kappa(i))});
    csv.close();
    ctx.add_output("bounds.csv");
  }

  int failures = 0;
  nlohmann::json summary;
  for (const Check& c : checks) {
    std::string detail;
    bool pass = false;
    try {
      pass = c.fn(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    out << (pass ? "[ok]   " : "[FAIL] ") << c.name;
    if (!detail.empty()) out << "  (" << detail << ")";
    out << "\n";
    summary[c.name] = pass;
    if (!pass) ++failures;
  }
  write_text_atomic(ctx.path("verify.json"), summary.dump(2) + "\n");
  ctx.add_output("verify.json");
  out << (failures == 0 ? "verify: all properties pass\n"
                        : "verify: " + std::to_string(failures) + " properties failed\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int run_subcommand(const RunnerOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    RunConfig rc = RunConfig::load(opts.config_path, opts.overrides);
    if (opts.seed) rc.seed = *opts.seed;

    RunContext ctx;
    ctx.cfg = std::move(rc);
    ctx.out_dir = resolve_out_dir(opts, ctx.cfg);
    ensure_directory(ctx.out_dir);
    ctx.manifest.subcommand = opts.subcommand;
    ctx.manifest.artifact_version = kVersion;
    ctx.manifest.seed = ctx.cfg.seed;
    ctx.manifest.config_echo = ctx.cfg.echo;
    ctx.manifest.started_utc = utc_timestamp();

    int code = 0;
    if (opts.subcommand == "simulate") {
      code = cmd_simulate(ctx, out);
    } else if (opts.subcommand == "mu") {
      code = cmd_mu(ctx, out);
    } else if (opts.subcommand == "critical") {
      code = cmd_critical(ctx, out);
    } else if (opts.subcommand == "slope") {
      code = cmd_slope(ctx, out);
    } else if (opts.subcommand == "scan") {
      code = cmd_scan(ctx, out);
    } else if (opts.subcommand == "verify") {
      code = cmd_verify(ctx, out);
    } else {
      err << "unknown subcommand '" << opts.subcommand << "'\n";
      return 2;
    }
    ctx.finish();
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ampcrit
