#pragma once

#include <memory>

#include "scatterkit/grid.hpp"

namespace scatterkit {

/// Fundamental solution of the 2D Helmholtz equation, (i/4) H0^(1)(k r), r > 0.
Complex helmholtz_green(double k, double r);

/// Discrete volume potential (T w)(x) = int Phi(x, y) w(y) dy on a grid.
///
/// Off-diagonal weights are the midpoint rule Phi(x_i - x_j) h^2; the
/// self-cell weight integrates Phi over the pixel (closed form over the
/// equal-area disk plus the exact square-vs-disk correction of the
/// logarithmic part), so H0 is never evaluated at 0. The resulting Toeplitz
/// matrix is applied by zero-padding to a 2n x 2n periodic grid (side 4 rho),
/// which makes the FFT convolution exact for sources anywhere in C_rho.
///
/// Copies share the FFT plans; apply() is safe to call concurrently.
class VolumePotential {
 public:
  VolumePotential(const Grid& grid, double k);

  const Grid& grid() const { return grid_; }
  double wave_number() const { return k_; }

  /// T w
  CMatrix apply(const CMatrix& w) const;
  /// T^* w = conj(T conj(w)); T is complex-symmetric.
  CMatrix apply_adjoint(const CMatrix& w) const;

  /// Matrix entry coupling pixels whose index offset is (di, dj).
  Complex weight(int di, int dj) const;

 private:
  struct Plan;
  Grid grid_;
  double k_;
  Complex self_weight_;
  std::shared_ptr<const Plan> plan_;
};

/// Convenience wrapper: builds a VolumePotential and applies it once.
CMatrix apply_kernel(const Grid& grid, double k, const CMatrix& w);

}  // namespace scatterkit
