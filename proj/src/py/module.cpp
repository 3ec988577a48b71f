#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ampcrit/divergence_lab.hpp"
#include "ampcrit/model_zoo.hpp"
#include "ampcrit/rng.hpp"

namespace py = pybind11;
using namespace ampcrit;

namespace {

Point to_point(const std::vector<double>& v) {
  Point p{0.0, 0.0, 0.0};
  for (std::size_t a = 0; a < std::min<std::size_t>(v.size(), 3); ++a) p[a] = v[a];
  return p;
}

ComplexMass make_mass(std::complex<double> m, bool infinite) {
  return infinite ? ComplexMass::infinite_mass() : ComplexMass::finite(m);
}

py::array_t<std::complex<double>> field_values(const EvolvedField& f) {
  const auto& g = f.grid;
  std::vector<py::ssize_t> shape;
  for (int a = 0; a < g.dim; ++a) shape.push_back(g.points_per_axis[a]);
  py::array_t<std::complex<double>> arr(shape);
  std::memcpy(arr.mutable_data(), f.values.data(), sizeof(Complex) * f.values.size());
  return arr;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Critical-coupling laboratory for the complex-mass linear amplifier "
            "driven by squared beamlet Gaussian fields";

  py::class_<TorusGrid>(m, "TorusGrid")
      .def_static("make", &TorusGrid::make, py::arg("dim"), py::arg("lengths"),
                  py::arg("points_per_axis"))
      .def_readonly("dim", &TorusGrid::dim)
      .def_readonly("total_points", &TorusGrid::total_points)
      .def("point", [](const TorusGrid& g, std::int64_t f) {
        const Point p = g.point(f);
        return std::vector<double>(p.begin(), p.begin() + g.dim);
      });

  py::class_<FieldModel>(m, "FieldModel")
      .def_readonly("mode_count", &FieldModel::mode_count)
      .def_readonly("dispersion_a", &FieldModel::dispersion_a)
      .def_property_readonly("amplitudes",
                             [](const FieldModel& mm) { return mm.amplitudes; })
      .def_property_readonly("grid", [](const FieldModel& mm) { return mm.grid; });

  py::class_<GaussianDraw>(m, "GaussianDraw")
      .def_static("from_amplitudes", &GaussianDraw::from_amplitudes)
      .def_readonly("s", &GaussianDraw::s)
      .def_readonly("k_vector", &GaussianDraw::k_vector)
      .def_readonly("norm_s", &GaussianDraw::norm_s);

  py::class_<EvolvedField>(m, "EvolvedField")
      .def_readonly("log_scale", &EvolvedField::log_scale)
      .def_readonly("time", &EvolvedField::time)
      .def_readonly("step_count", &EvolvedField::step_count)
      .def("log_abs_at", &EvolvedField::log_abs_at)
      .def_property_readonly("values", &field_values);

  py::class_<Direction>(m, "Direction")
      .def_static("make", &Direction::make)
      .def_readonly("sigma", &Direction::sigma);

  py::class_<MuResult>(m, "MuResult")
      .def_readonly("mu", &MuResult::mu)
      .def_readonly("sigma_star", &MuResult::sigma_star)
      .def_readonly("trace", &MuResult::trace)
      .def_readonly("starts_used", &MuResult::starts_used)
      .def_readonly("converged", &MuResult::converged)
      .def_readonly("start_values", &MuResult::start_values);

  py::class_<CriticalReport>(m, "CriticalReport")
      .def_readonly("q", &CriticalReport::q)
      .def_readonly("mu_xt", &CriticalReport::mu_xt)
      .def_readonly("lambda_q", &CriticalReport::lambda_q)
      .def_readonly("mu1_const", &CriticalReport::mu1_const)
      .def_readonly("lambda_bar_q", &CriticalReport::lambda_bar_q)
      .def_readonly("ratio", &CriticalReport::ratio);

  py::class_<MomentEstimate>(m, "MomentEstimate")
      .def_readonly("q", &MomentEstimate::q)
      .def_readonly("lambda_", &MomentEstimate::lambda)
      .def_readonly("mean", &MomentEstimate::mean)
      .def_readonly("std_error", &MomentEstimate::std_error)
      .def_readonly("samples", &MomentEstimate::samples)
      .def_readonly("finite_flag", &MomentEstimate::finite_flag);

  m.def("build_beamlet_model",
        [](const TorusGrid& grid, const std::vector<std::vector<int>>& indices, double a,
           const std::vector<double>& amps) {
          std::vector<std::array<int, 3>> idx;
          for (const auto& t : indices) {
            std::array<int, 3> e{0, 0, 0};
            for (std::size_t j = 0; j < std::min<std::size_t>(t.size(), 3); ++j)
              e[j] = t[j];
            idx.push_back(e);
          }
          return build_beamlet_model(grid, idx, a, amps);
        },
        py::arg("grid"), py::arg("mode_indices"), py::arg("dispersion_a"), py::arg("amplitudes"));

  m.def("sample_gaussian", &sample_gaussian, py::arg("model"), py::arg("stream_seed"),
        py::arg("sample_index"));

  m.def("eval_field",
        [](const FieldModel& model, const GaussianDraw& d, const std::vector<double>& x, double t) {
          return eval_field(model, d, to_point(x), t);
        },
        py::arg("model"), py::arg("draw"), py::arg("x"), py::arg("t"));

  m.def("monomials",
        [](const FieldModel& model, const std::vector<double>& x, double t) {
          return monomials(model, to_point(x), t);
        },
        py::arg("model"), py::arg("x"), py::arg("t"));

  m.def("normalization_integral", &normalization_integral, py::arg("model"),
        py::arg("time_slices") = 64);

  m.def("solve_amplifier",
        [](const FieldModel& model, const GaussianDraw& d, std::complex<double> mass,
           bool infinite_mass, double lam, double horizon, double dt) {
          return solve_amplifier(model, d, make_mass(mass, infinite_mass), lam, horizon, dt);
        },
        py::arg("model"), py::arg("draw"), py::arg("mass") = std::complex<double>(0, 1),
        py::arg("infinite_mass") = false, py::arg("lambda_") = 0.1, py::arg("horizon") = 1.0,
        py::arg("dt") = 1.0 / 1024);

  m.def("solve_eta",
        [](const FieldModel& model, const Eigen::VectorXcd& eta, std::complex<double> mass,
           bool infinite_mass, double horizon, double dt) {
          return solve_eta(model, eta, make_mass(mass, infinite_mass), horizon, dt);
        },
        py::arg("model"), py::arg("eta"), py::arg("mass") = std::complex<double>(0, 1),
        py::arg("infinite_mass") = false, py::arg("horizon") = 1.0, py::arg("dt") = 1.0 / 1024);

  m.def("mu_alternating",
        [](const FieldModel& model, double horizon, int slices, int n_starts, std::uint64_t seed) {
          MuOptions mo;
          mo.n_starts = n_starts;
          mo.seed = seed;
          return mu_alternating(model, TimeGrid::make(horizon, slices), mo);
        },
        py::arg("model"), py::arg("horizon") = 1.0, py::arg("slices") = 256,
        py::arg("n_starts") = 8, py::arg("seed") = 1);

  m.def("mu_oracle_sphere_grid",
        [](const FieldModel& model, double horizon, int slices, int resolution) {
          return mu_oracle_sphere_grid(model, TimeGrid::make(horizon, slices), resolution);
        },
        py::arg("model"), py::arg("horizon") = 1.0, py::arg("slices") = 128,
        py::arg("resolution") = 100);

  m.def("critical_report",
        [](const FieldModel& model, double horizon, int slices, int q,
           const std::vector<double>& x, int n_starts, std::uint64_t seed) {
          MuOptions mo;
          mo.n_starts = n_starts;
          mo.seed = seed;
          return critical_report(model, TimeGrid::make(horizon, slices), q, to_point(x), mo);
        },
        py::arg("model"), py::arg("horizon") = 1.0, py::arg("slices") = 256, py::arg("q") = 1,
        py::arg("x") = std::vector<double>{0.0}, py::arg("n_starts") = 8, py::arg("seed") = 1);

  m.def("closed_form_free_moment",
        [](const Eigen::VectorXd& eigs, int q, double lam) {
          const FreeMoment fm = closed_form_free_moment(eigs, q, lam);
          return py::make_tuple(fm.finite, fm.value);
        },
        py::arg("eigenvalues"), py::arg("q"), py::arg("lambda_"));

  m.def("mc_moment",
        [](const FieldModel& model, std::complex<double> mass, bool infinite_mass, double lam,
           int q, const std::vector<double>& x, double horizon, int slices,
           std::int64_t n_samples, std::uint64_t stream_seed, int threads) {
          McOptions mo;
          mo.threads = threads;
          return mc_moment(model, make_mass(mass, infinite_mass), lam, q, to_point(x),
                           TimeGrid::make(horizon, slices), n_samples, stream_seed, mo);
        },
        py::arg("model"), py::arg("mass") = std::complex<double>(0, 1),
        py::arg("infinite_mass") = false, py::arg("lambda_") = 0.1, py::arg("q") = 1,
        py::arg("x") = std::vector<double>{0.0}, py::arg("horizon") = 1.0,
        py::arg("slices") = 256, py::arg("n_samples") = 1000, py::arg("stream_seed") = 1,
        py::arg("threads") = 1);

  m.def("uniform_beamlet", &uniform_beamlet, py::arg("points") = 32,
        py::arg("length") = 2.0 * M_PI);
  m.def("two_equal_beamlets", &two_equal_beamlets, py::arg("dispersion_a"),
        py::arg("points") = 64);
  m.def("random_model", [](std::uint64_t seed) { return random_model(seed); }, py::arg("seed"));
}
