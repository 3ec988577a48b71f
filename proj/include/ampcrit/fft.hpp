#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "ampcrit/torus.hpp"

namespace ampcrit {

// Complex DFT over a TorusGrid, FFTW backend. Plans are created once per
// instance; fftw's planner is not thread-safe, so creation and destruction
// are serialized behind a global mutex. forward/inverse are safe to call
// concurrently on distinct instances.
class FourierTransform {
 public:
  explicit FourierTransform(const TorusGrid& grid);
  ~FourierTransform();
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  // In-place unnormalized forward transform.
  void forward(std::complex<double>* data) const;
  // In-place inverse transform scaled by 1/total_points.
  void inverse(std::complex<double>* data) const;

  std::int64_t size() const { return n_; }

 private:
  std::int64_t n_ = 0;
  void* buffer_ = nullptr;  // fftw_complex*
  void* fwd_ = nullptr;     // fftw_plan
  void* bwd_ = nullptr;
};

// |k|^2 for every flat grid index, symmetric spectral truncation
// (frequencies j <= N/2 positive, j > N/2 mapped to j - N).
std::vector<double> wavenumber_squares(const TorusGrid& grid);

}  // namespace ampcrit
