#include "ampcrit/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>

namespace ampcrit {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FourierTransform::FourierTransform(const TorusGrid& grid) : n_(grid.total_points) {
  int dims[3];
  for (int a = 0; a < grid.dim; ++a) dims[a] = grid.points_per_axis[a];
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto* buf = fftw_alloc_complex(static_cast<std::size_t>(n_));
  buffer_ = buf;
  fwd_ = fftw_plan_dft(grid.dim, dims, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft(grid.dim, dims, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
}

FourierTransform::~FourierTransform() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
  fftw_free(static_cast<fftw_complex*>(buffer_));
}

void FourierTransform::forward(std::complex<double>* data) const {
  auto* buf = static_cast<fftw_complex*>(buffer_);
  std::memcpy(buf, static_cast<const void*>(data), sizeof(fftw_complex) * n_);
  fftw_execute(static_cast<fftw_plan>(fwd_));
  std::memcpy(static_cast<void*>(data), buf, sizeof(fftw_complex) * n_);
}

void FourierTransform::inverse(std::complex<double>* data) const {
  auto* buf = static_cast<fftw_complex*>(buffer_);
  std::memcpy(buf, static_cast<const void*>(data), sizeof(fftw_complex) * n_);
  fftw_execute(static_cast<fftw_plan>(bwd_));
  const double scale = 1.0 / static_cast<double>(n_);
  for (std::int64_t i = 0; i < n_; ++i)
    data[i] = std::complex<double>(buf[i][0] * scale, buf[i][1] * scale);
}

std::vector<double> wavenumber_squares(const TorusGrid& grid) {
  std::vector<double> k2(static_cast<std::size_t>(grid.total_points), 0.0);
  for (std::int64_t f = 0; f < grid.total_points; ++f) {
    const auto idx = grid.unflatten(f);
    double acc = 0.0;
    for (int a = 0; a < grid.dim; ++a) {
      const int n = grid.points_per_axis[a];
      const int j = idx[a] <= n / 2 ? idx[a] : idx[a] - n;
      const double k = 2.0 * M_PI / grid.lengths[a] * j;
      acc += k * k;
    }
    k2[static_cast<std::size_t>(f)] = acc;
  }
  return k2;
}

}  // namespace ampcrit
