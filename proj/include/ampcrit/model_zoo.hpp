#pragma once

#include <cstdint>

#include "ampcrit/field_model.hpp"

namespace ampcrit {

// Canonical configurations used across the test batteries.

// Single beamlet on a 1-torus; |S| is spatially uniform so the amplifier has
// the exact solution exp(lambda |s1|^2 t).
FieldModel uniform_beamlet(int points = 32, double length = 2.0 * M_PI);

// Two equal-amplitude beamlets with mode indices 0 and 1 on a 1-torus of
// length 2*pi; the dispersion gap is omega = a, and
//   mu_{x,t} = t,   mu_1[x(.)=x] = A^2 (t + |2 sin(omega t / 2) / omega|).
FieldModel two_equal_beamlets(double dispersion_a, int points = 64);

struct RandomModelOptions {
  int min_modes = 2;
  int max_modes = 2;
  int max_dim = 1;
  int max_index = 2;
  int points_1d = 64;
  int points_2d = 32;
  int points_3d = 16;
  double min_amp = 0.3;
  double max_amp = 1.0;
  double min_a = 0.3;
  double max_a = 1.5;
  double min_length = 5.0;
  double max_length = 8.0;
};

// Deterministic pseudo-random model for property sweeps.
FieldModel random_model(std::uint64_t seed, const RandomModelOptions& opts = {});

}  // namespace ampcrit
