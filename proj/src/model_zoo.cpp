#include "ampcrit/model_zoo.hpp"

#include <set>

#include "ampcrit/rng.hpp"

namespace ampcrit {

FieldModel uniform_beamlet(int points, double length) {
  const TorusGrid grid = TorusGrid::make(1, {length}, {points});
  return build_beamlet_model(grid, {{0, 0, 0}}, 1.0, {1.0});
}

FieldModel two_equal_beamlets(double dispersion_a, int points) {
  const TorusGrid grid = TorusGrid::make(1, {2.0 * M_PI}, {points});
  return build_beamlet_model(grid, {{0, 0, 0}, {1, 0, 0}}, dispersion_a, {1.0, 1.0});
}

FieldModel random_model(std::uint64_t seed, const RandomModelOptions& opts) {
  std::uint64_t c = 0;
  auto uni = [&]() { return rng::uniform01(seed, c++); };
  auto pick_int = [&](int lo, int hi) {  // inclusive
    return lo + static_cast<int>(uni() * (hi - lo + 1));
  };

  const int dim = pick_int(1, opts.max_dim);
  const int M = pick_int(opts.min_modes, opts.max_modes);
  const int pts = dim == 1 ? opts.points_1d : (dim == 2 ? opts.points_2d : opts.points_3d);

  std::vector<double> lengths(static_cast<std::size_t>(dim));
  std::vector<int> ppa(static_cast<std::size_t>(dim), pts);
  for (int a = 0; a < dim; ++a)
    lengths[static_cast<std::size_t>(a)] = opts.min_length + uni() * (opts.max_length - opts.min_length);
  const TorusGrid grid = TorusGrid::make(dim, lengths, ppa);

  std::set<std::array<int, 3>> used;
  std::vector<std::array<int, 3>> indices;
  while (static_cast<int>(indices.size()) < M) {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = 0; a < dim; ++a) idx[a] = pick_int(-opts.max_index, opts.max_index);
    if (used.insert(idx).second) indices.push_back(idx);
  }

  std::vector<double> amps(static_cast<std::size_t>(M));
  for (int n = 0; n < M; ++n)
    amps[static_cast<std::size_t>(n)] = opts.min_amp + uni() * (opts.max_amp - opts.min_amp);
  const double a = opts.min_a + uni() * (opts.max_a - opts.min_a);
  return build_beamlet_model(grid, indices, a, amps);
}

}  // namespace ampcrit
