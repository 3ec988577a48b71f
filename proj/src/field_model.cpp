#include "ampcrit/field_model.hpp"

#include <cmath>
#include <stdexcept>

#include "ampcrit/rng.hpp"

namespace ampcrit {

Eigen::VectorXd HermitianForm::eigenvalues_descending() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(entries, Eigen::EigenvaluesOnly);
  return es.eigenvalues().reverse();
}

std::pair<double, Eigen::VectorXcd> HermitianForm::top_eigenpair(
    const Eigen::VectorXcd* reference, double gap_tol) const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(entries);
  const int M = order();
  const double top = es.eigenvalues()(M - 1);
  int best = M - 1;
  if (reference != nullptr) {
    double best_overlap = -1.0;
    for (int j = M - 1; j >= 0; --j) {
      if (top - es.eigenvalues()(j) > gap_tol * std::max(1.0, std::abs(top))) break;
      const double ov = std::abs(reference->dot(es.eigenvectors().col(j)));
      if (ov > best_overlap) {
        best_overlap = ov;
        best = j;
      }
    }
  }
  return {top, es.eigenvectors().col(best)};
}

GaussianDraw GaussianDraw::from_amplitudes(const Eigen::VectorXcd& s) {
  const int M = static_cast<int>(s.size());
  GaussianDraw d;
  d.s = s;
  d.norm_s = s.norm();
  d.k_vector.resize(M * M);
  int i = 0;
  for (int n = 0; n < M; ++n) d.k_vector(i++) = std::norm(s(n));
  for (int n = 0; n < M; ++n)
    for (int m = n + 1; m < M; ++m) d.k_vector(i++) = M_SQRT2 * std::real(s(n) * std::conj(s(m)));
  for (int n = 0; n < M; ++n)
    for (int m = n + 1; m < M; ++m) d.k_vector(i++) = M_SQRT2 * std::imag(s(n) * std::conj(s(m)));
  return d;
}

int monomial_count(int M) { return M * M; }

MonomialIndex monomial_index(int M, int i) {
  if (i < 0 || i >= M * M) throw std::out_of_range("monomial index out of range");
  if (i < M) return {0, i, i};
  const int pairs = M * (M - 1) / 2;
  int p = i - M;
  int kind = 1;
  if (p >= pairs) {
    p -= pairs;
    kind = 2;
  }
  // p-th pair (n, m), n < m, lexicographic
  int n = 0;
  int remaining = p;
  while (remaining >= M - 1 - n) {
    remaining -= M - 1 - n;
    ++n;
  }
  return {kind, n, n + 1 + remaining};
}

FieldModel build_beamlet_model(const TorusGrid& grid,
                               const std::vector<std::array<int, 3>>& wavevector_indices,
                               double dispersion_a,
                               const std::vector<double>& raw_amplitudes) {
  const int M = static_cast<int>(wavevector_indices.size());
  if (M < 1) throw std::invalid_argument("at least one beamlet mode is required");
  if (raw_amplitudes.size() != static_cast<std::size_t>(M))
    throw std::invalid_argument("one raw amplitude per mode is required");
  for (int n = 0; n < M; ++n)
    for (int m = n + 1; m < M; ++m)
      if (wavevector_indices[n] == wavevector_indices[m])
        throw std::invalid_argument("duplicate wavevectors: degenerate modes are not independent");
  for (double a : raw_amplitudes)
    if (!(a > 0.0)) throw std::invalid_argument("beamlet amplitudes must be positive");
  if (!std::isfinite(dispersion_a)) throw std::invalid_argument("dispersion coefficient must be finite");

  FieldModel model;
  model.grid = grid;
  model.mode_count = M;
  model.mode_indices = wavevector_indices;
  model.dispersion_a = dispersion_a;
  model.wavevectors.resize(M);
  model.mode_k2.resize(M);
  for (int n = 0; n < M; ++n) {
    std::array<double, 3> k{0.0, 0.0, 0.0};
    double k2 = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
      k[a] = 2.0 * M_PI / grid.lengths[a] * wavevector_indices[n][a];
      k2 += k[a] * k[a];
    }
    for (int a = grid.dim; a < 3; ++a)
      if (wavevector_indices[n][a] != 0)
        throw std::invalid_argument("mode index set beyond torus dimension");
    model.wavevectors[n] = k;
    model.mode_k2(n) = k2;
  }

  // |Phi_n| is constant for plane waves, so the normalization reduces to
  // sum_n A_n^2 = 1: one global rescale of the raw amplitudes.
  double sumsq = 0.0;
  for (double a : raw_amplitudes) sumsq += a * a;
  model.normalization_factor = 1.0 / std::sqrt(sumsq);
  model.amplitudes.resize(M);
  for (int n = 0; n < M; ++n) model.amplitudes(n) = raw_amplitudes[n] * model.normalization_factor;

  model.spatial_phase.resize(M);
  for (int n = 0; n < M; ++n) {
    Eigen::VectorXcd tab(grid.total_points);
    for (std::int64_t f = 0; f < grid.total_points; ++f) {
      const Point x = grid.point(f);
      double ph = 0.0;
      for (int a = 0; a < grid.dim; ++a) ph += model.wavevectors[n][a] * x[a];
      tab(f) = Complex(std::cos(ph), std::sin(ph));
    }
    model.spatial_phase[n] = std::move(tab);
  }
  return model;
}

Complex FieldModel::mode_at(int n, const Point& x, double t) const {
  double ph = dispersion_a * mode_k2(n) * t;
  for (int a = 0; a < grid.dim; ++a) ph += wavevectors[n][a] * x[a];
  return amplitudes(n) * Complex(std::cos(ph), std::sin(ph));
}

Eigen::VectorXcd FieldModel::beamlets_at(const Point& x, double t) const {
  Eigen::VectorXcd v(mode_count);
  for (int n = 0; n < mode_count; ++n) v(n) = mode_at(n, x, t);
  return v;
}

Eigen::VectorXcd FieldModel::time_coefficients(double t) const {
  Eigen::VectorXcd c(mode_count);
  for (int n = 0; n < mode_count; ++n) {
    const double ph = dispersion_a * mode_k2(n) * t;
    c(n) = amplitudes(n) * Complex(std::cos(ph), std::sin(ph));
  }
  return c;
}

int FieldModel::max_index_on_axis(int axis) const {
  int m = 0;
  for (const auto& idx : mode_indices) m = std::max(m, std::abs(idx[axis]));
  return m;
}

GaussianDraw sample_gaussian(const FieldModel& model, std::uint64_t stream_seed,
                             std::uint64_t sample_index) {
  const int M = model.mode_count;
  Eigen::VectorXcd s(M);
  for (int n = 0; n < M; ++n)
    s(n) = rng::standard_complex(stream_seed, sample_index * static_cast<std::uint64_t>(M) + n);
  return GaussianDraw::from_amplitudes(s);
}

Complex eval_field(const FieldModel& model, const GaussianDraw& draw, const Point& x, double t) {
  Complex acc{0.0, 0.0};
  for (int n = 0; n < model.mode_count; ++n) acc += draw.s(n) * model.mode_at(n, x, t);
  return acc;
}

HermitianForm gamma_at(const FieldModel& model, const Point& x, double t) {
  const Eigen::VectorXcd phi = model.beamlets_at(x, t);
  HermitianForm g;
  g.entries = phi.conjugate() * phi.transpose();
  return g;
}

Eigen::VectorXd monomials(const FieldModel& model, const Point& x, double t) {
  const int M = model.mode_count;
  const Eigen::VectorXcd phi = model.beamlets_at(x, t);
  Eigen::VectorXd out(M * M);
  int i = 0;
  for (int n = 0; n < M; ++n) out(i++) = std::norm(phi(n));
  for (int n = 0; n < M; ++n)
    for (int m = n + 1; m < M; ++m)
      out(i++) = M_SQRT2 * std::real(std::conj(phi(n)) * phi(m));
  for (int n = 0; n < M; ++n)
    for (int m = n + 1; m < M; ++m)
      out(i++) = M_SQRT2 * std::imag(std::conj(phi(n)) * phi(m));
  return out;
}

double monomial_at(const FieldModel& model, int i, const Point& x, double t) {
  const MonomialIndex mi = monomial_index(model.mode_count, i);
  if (mi.kind == 0) return std::norm(model.mode_at(mi.n, x, t));
  const Complex g = std::conj(model.mode_at(mi.n, x, t)) * model.mode_at(mi.m, x, t);
  return mi.kind == 1 ? M_SQRT2 * std::real(g) : M_SQRT2 * std::imag(g);
}

Eigen::MatrixXcd eta_matrix(int M, const Eigen::VectorXcd& eta) {
  if (eta.size() != static_cast<Eigen::Index>(M) * M)
    throw std::invalid_argument("eta must have M^2 components");
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(M, M);
  const Complex i_unit{0.0, 1.0};
  int i = 0;
  for (int n = 0; n < M; ++n) H(n, n) += eta(i++);
  for (int n = 0; n < M; ++n)
    for (int m = n + 1; m < M; ++m) {
      H(n, m) += eta(i) * M_SQRT1_2;
      H(m, n) += eta(i) * M_SQRT1_2;
      ++i;
    }
  for (int n = 0; n < M; ++n)
    for (int m = n + 1; m < M; ++m) {
      H(n, m) += i_unit * eta(i) * M_SQRT1_2;
      H(m, n) -= i_unit * eta(i) * M_SQRT1_2;
      ++i;
    }
  return H;
}

double normalization_integral(const FieldModel& model, int time_slices) {
  // (1/|L|) sum_n int_0^1 int |Phi_n|^2 dx dtau, midpoint in tau, grid sum in x.
  double acc = 0.0;
  const double dtau = 1.0 / time_slices;
  for (int j = 0; j < time_slices; ++j) {
    const double tau = (j + 0.5) * dtau;
    for (std::int64_t f = 0; f < model.grid.total_points; ++f) {
      const Point x = model.grid.point(f);
      for (int n = 0; n < model.mode_count; ++n) acc += std::norm(model.mode_at(n, x, tau));
    }
  }
  return acc * dtau * model.grid.cell_volume() / model.grid.volume();
}

}  // namespace ampcrit
