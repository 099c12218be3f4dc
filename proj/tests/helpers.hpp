#pragma once

#include <cstdint>

#include "scatterkit/dataset.hpp"
#include "scatterkit/grid.hpp"
#include "scatterkit/rng.hpp"

namespace testutil {

using namespace scatterkit;

inline CMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  CMatrix out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
  }
  return out;
}

inline double rel(const CMatrix& a, const CMatrix& b) { return (a - b).norm() / b.norm(); }

/// Two fixed ellipses inside B_3, scaled to max|m| = peak.
inline ContrastField two_ellipses(const Grid& grid, double peak) {
  EllipseScene scene;
  scene.ellipses.push_back({Point(-1.0, 0.4), 1.0, 0.5, 0.3, 2.0});
  scene.ellipses.push_back({Point(1.1, -0.8), 0.8, 0.4, 1.9, 1.0});
  return scale_to_max(rasterize(scene, grid), peak);
}

}  // namespace testutil
