#include "ampcrit/spectral_optimizer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ampcrit/parallel.hpp"
#include "ampcrit/rng.hpp"

namespace ampcrit {

Direction Direction::make(const Eigen::VectorXcd& v) {
  const double nrm = v.norm();
  if (!(nrm > 0.0)) throw std::invalid_argument("direction must be nonzero");
  Direction d;
  d.sigma = v / nrm;
  for (Eigen::Index n = 0; n < d.sigma.size(); ++n) {
    const double mag = std::abs(d.sigma(n));
    if (mag > 1e-12) {
      d.sigma *= std::conj(d.sigma(n)) / mag;  // global phase gauge
      break;
    }
  }
  return d;
}

namespace {

// sup_x |sigma . Phi(x,tau)|^2 per slice, grid scan over the precomputed
// spatial tables plus parabolic polish. Optional extra candidate points keep
// the alternating iteration exactly monotone: the previous profile and the
// warm-start point always compete with the fresh argmax.
struct SliceSup {
  double value;
  Point argmax;
};

SliceSup slice_sup(const FieldModel& model, const Eigen::VectorXcd& sigma, double tau,
                   const Point* extra_a, const Point* extra_b) {
  const int M = model.mode_count;
  const Eigen::VectorXcd tc = model.time_coefficients(tau);
  Eigen::VectorXcd coef(M);
  for (int n = 0; n < M; ++n) coef(n) = sigma(n) * tc(n);

  std::int64_t best = 0;
  double best_val = -1.0;
  for (std::int64_t f = 0; f < model.grid.total_points; ++f) {
    Complex acc{0.0, 0.0};
    for (int n = 0; n < M; ++n) acc += coef(n) * model.spatial_phase[n](f);
    const double v = std::norm(acc);
    if (v > best_val + 1e-12 * (1.0 + std::abs(best_val))) {
      best_val = v;
      best = f;
    }
  }
  auto Wx = [&](const Point& x) {
    Complex acc{0.0, 0.0};
    for (int n = 0; n < M; ++n) acc += sigma(n) * model.mode_at(n, x, tau);
    return std::norm(acc);
  };
  SliceMax sm = polish_argmax(model.grid, best, best_val, Wx);
  SliceSup out{sm.value, sm.argmax};
  for (const Point* p : {extra_a, extra_b}) {
    if (p == nullptr) continue;
    const double v = Wx(*p);
    if (v > out.value) {
      out.value = v;
      out.argmax = *p;
    }
  }
  return out;
}

DirectionValue direction_value_impl(const FieldModel& model, const Direction& sigma,
                                    const TimeGrid& tgrid, const std::vector<Point>* profile,
                                    const Point* global_extra) {
  DirectionValue out;
  out.maximizers.resize(static_cast<std::size_t>(tgrid.slices));
  const double dt = tgrid.dt();
  for (int j = 0; j < tgrid.slices; ++j) {
    const Point* prev = profile ? &(*profile)[static_cast<std::size_t>(j)] : nullptr;
    const SliceSup s = slice_sup(model, sigma.sigma, tgrid.midpoint(j), prev, global_extra);
    out.value += s.value * dt;
    out.maximizers[static_cast<std::size_t>(j)] = s.argmax;
  }
  return out;
}

}  // namespace

DirectionValue direction_value(const FieldModel& model, const Direction& sigma,
                               const TimeGrid& tgrid) {
  return direction_value_impl(model, sigma, tgrid, nullptr, nullptr);
}

HermitianForm integrated_gamma_profile(const FieldModel& model,
                                       const std::vector<Point>& slice_points,
                                       const TimeGrid& tgrid) {
  if (slice_points.size() != static_cast<std::size_t>(tgrid.slices))
    throw std::invalid_argument("need one point per time slice");
  const int M = model.mode_count;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(M, M);
  const double dt = tgrid.dt();
  for (int j = 0; j < tgrid.slices; ++j) {
    const Eigen::VectorXcd phi =
        model.beamlets_at(slice_points[static_cast<std::size_t>(j)], tgrid.midpoint(j));
    acc.noalias() += dt * (phi.conjugate() * phi.transpose());
  }
  HermitianForm g;
  g.entries = 0.5 * (acc + acc.adjoint());  // scrub rounding asymmetry
  return g;
}

HermitianForm integrated_gamma(const FieldModel& model, const Point& x, const TimeGrid& tgrid) {
  return integrated_gamma_profile(model,
                                  std::vector<Point>(static_cast<std::size_t>(tgrid.slices), x),
                                  tgrid);
}

HermitianForm integrated_gamma(const FieldModel& model, const DiscretePath& path,
                               const TimeGrid& tgrid) {
  std::vector<Point> pts(static_cast<std::size_t>(tgrid.slices));
  for (int j = 0; j < tgrid.slices; ++j)
    pts[static_cast<std::size_t>(j)] = path.at(tgrid.midpoint(j));
  return integrated_gamma_profile(model, pts, tgrid);
}

MuResult mu_alternating(const FieldModel& model, const TimeGrid& tgrid, const MuOptions& opts) {
  if (opts.n_starts < 1) throw std::invalid_argument("need at least one start");
  const int M = model.mode_count;
  const Point anchor = model.grid.wrap(opts.anchor);

  // Start 0: top eigenvector of the anchor-point integrated gamma.
  std::vector<Direction> starts;
  starts.reserve(static_cast<std::size_t>(opts.n_starts));
  starts.push_back(Direction::make(integrated_gamma(model, anchor, tgrid).top_eigenpair().second));
  const std::uint64_t sseed = rng::substream(opts.seed, 1);
  for (int k = 1; k < opts.n_starts; ++k) {
    Eigen::VectorXcd v(M);
    for (int n = 0; n < M; ++n)
      v(n) = rng::standard_complex(sseed, static_cast<std::uint64_t>(k - 1) * M + n);
    starts.push_back(Direction::make(v));
  }

  struct StartOutcome {
    double value = 0.0;
    Direction sigma;
    std::vector<Point> maximizers;
    std::vector<double> trace;
    bool converged = false;
  };
  std::vector<StartOutcome> outcomes(static_cast<std::size_t>(opts.n_starts));

  parallel_for(opts.n_starts, opts.threads, [&](std::int64_t si) {
    StartOutcome& oc = outcomes[static_cast<std::size_t>(si)];
    Direction sigma = starts[static_cast<std::size_t>(si)];
    std::vector<Point> profile;
    double prev = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < opts.max_iters; ++it) {
      const DirectionValue dv = direction_value_impl(
          model, sigma, tgrid, profile.empty() ? nullptr : &profile, &anchor);
      oc.trace.push_back(dv.value);
      oc.value = dv.value;
      oc.sigma = sigma;
      oc.maximizers = dv.maximizers;
      if (dv.value - prev < opts.tol) {
        oc.converged = true;
        break;
      }
      prev = dv.value;
      profile = dv.maximizers;
      const HermitianForm A = integrated_gamma_profile(model, profile, tgrid);
      sigma = Direction::make(A.top_eigenpair(&sigma.sigma).second);
    }
  });

  MuResult res;
  res.starts_used = opts.n_starts;
  int winner = 0;
  for (int k = 1; k < opts.n_starts; ++k)
    if (outcomes[static_cast<std::size_t>(k)].value > outcomes[static_cast<std::size_t>(winner)].value)
      winner = k;
  const StartOutcome& w = outcomes[static_cast<std::size_t>(winner)];
  res.mu = w.value;
  res.sigma_star = w.sigma;
  res.slice_maximizers = w.maximizers;
  res.trace = w.trace;
  res.converged = w.converged;
  for (const auto& oc : outcomes) {
    res.all_traces.push_back(oc.trace);
    res.start_values.push_back(oc.value);
  }
  return res;
}

double mu_oracle_sphere_grid(const FieldModel& model, const TimeGrid& tgrid, int resolution) {
  const int M = model.mode_count;
  if (M > 2) throw std::invalid_argument("sphere-grid oracle supports M <= 2 only");
  if (resolution < 2) throw std::invalid_argument("resolution must be at least 2");
  if (M == 1) {
    Eigen::VectorXcd one(1);
    one(0) = 1.0;
    return direction_value(model, Direction::make(one), tgrid).value;
  }
  double best = 0.0;
  for (int i = 0; i < resolution; ++i) {
    const double theta = 0.5 * M_PI * i / (resolution - 1);
    for (int j = 0; j < resolution; ++j) {
      const double phi = 2.0 * M_PI * j / resolution;
      Eigen::VectorXcd v(2);
      v(0) = std::cos(theta);
      v(1) = std::sin(theta) * Complex(std::cos(phi), std::sin(phi));
      best = std::max(best, direction_value(model, Direction::make(v), tgrid).value);
    }
  }
  return best;
}

namespace {

CovarianceSpectrum nystrom_from_profile(const FieldModel& model,
                                        const std::vector<Point>& pts,
                                        const std::vector<double>& taus, double horizon) {
  const int K = static_cast<int>(taus.size());
  const int M = model.mode_count;
  Eigen::MatrixXcd psi(M, K);  // Phi(x(tau_l), tau_l) per column
  for (int l = 0; l < K; ++l)
    psi.col(l) = model.beamlets_at(pts[static_cast<std::size_t>(l)], taus[static_cast<std::size_t>(l)]);

  const double h = horizon / (K - 1);
  Eigen::VectorXd sqw(K);
  for (int l = 0; l < K; ++l) sqw(l) = std::sqrt((l == 0 || l == K - 1) ? 0.5 * h : h);

  // B = D^{1/2} C D^{1/2} with C_{jl} = psi_j^dag psi_l.
  Eigen::MatrixXcd B(K, K);
  for (int j = 0; j < K; ++j)
    for (int l = 0; l < K; ++l) B(j, l) = sqw(j) * sqw(l) * psi.col(j).dot(psi.col(l));
  B = 0.5 * (B + B.adjoint()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(B, Eigen::EigenvaluesOnly);
  CovarianceSpectrum out;
  out.eigenvalues = es.eigenvalues().reverse();
  out.nodes = taus;
  return out;
}

}  // namespace

CovarianceSpectrum nystrom_covariance_eigs(const FieldModel& model, const Point& x,
                                           double horizon, int K) {
  if (K < 2) throw std::invalid_argument("nystrom needs at least 2 nodes");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  std::vector<double> taus(static_cast<std::size_t>(K));
  for (int l = 0; l < K; ++l) taus[static_cast<std::size_t>(l)] = horizon * l / (K - 1);
  return nystrom_from_profile(model, std::vector<Point>(static_cast<std::size_t>(K), x), taus,
                              horizon);
}

CovarianceSpectrum nystrom_covariance_eigs(const FieldModel& model, const DiscretePath& path,
                                           int K) {
  if (K < 2) throw std::invalid_argument("nystrom needs at least 2 nodes");
  const double t = path.tgrid.horizon;
  std::vector<double> taus(static_cast<std::size_t>(K));
  std::vector<Point> pts(static_cast<std::size_t>(K));
  for (int l = 0; l < K; ++l) {
    const double tau = t * l / (K - 1);
    taus[static_cast<std::size_t>(l)] = tau;
    pts[static_cast<std::size_t>(l)] = path.at(tau);
  }
  return nystrom_from_profile(model, pts, taus, t);
}

CriticalReport critical_report(const FieldModel& model, const TimeGrid& tgrid, int q,
                               const Point& x, const MuOptions& opts) {
  if (q < 1) throw std::invalid_argument("q must be a positive integer");
  CriticalReport rep;
  rep.q = q;
  rep.mu1_const = integrated_gamma(model, x, tgrid).eigenvalues_descending()(0);

  // Anchoring the optimizer at the probe keeps the constant path x(.) = x in
  // the candidate set, so mu_xt >= mu1_const holds at the discrete level and
  // a post-check violation really does signal a bug.
  MuOptions mo = opts;
  mo.anchor = x;
  const MuResult mu = mu_alternating(model, tgrid, mo);
  rep.mu_xt = mu.mu;
  if (!(rep.mu_xt > 0.0)) throw std::logic_error("mu_xt must be positive");
  rep.lambda_q = 1.0 / (q * rep.mu_xt);
  rep.lambda_bar_q = 1.0 / (q * rep.mu1_const);
  rep.ratio = rep.lambda_bar_q / rep.lambda_q;
  if (rep.lambda_q > rep.lambda_bar_q + 1e-10)
    throw std::logic_error("lambda_q exceeds lambda_bar_q: optimizer or quadrature bug");
  return rep;
}

}  // namespace ampcrit
