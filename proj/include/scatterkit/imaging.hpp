#pragma once

#include "scatterkit/grid.hpp"

namespace scatterkit {

/// Orthogonality-sampling indicator evaluated at the pixel centers.
struct ImagingMatrix {
  Grid grid;
  RMatrix values;
  double wave_number;
};

/// (2 pi/Q)(2 pi/P) sum_q | sum_p U(x_p, d_q) e^{i k0 x_p . z} |^2, with k0 the
/// data's wave number.
double imaging_value(const FarFieldMatrix& data, const Point& z);

/// Indicator on every pixel center, computed as one dense product per grid
/// row (separable phase factors). Agrees with imaging_matrix_pointwise to
/// rounding.
ImagingMatrix imaging_matrix(const FarFieldMatrix& data, const Grid& grid);

/// Reference implementation: imaging_value at each pixel.
ImagingMatrix imaging_matrix_pointwise(const FarFieldMatrix& data, const Grid& grid);

/// A / max|A_ij|, with the zero matrix mapped to itself.
RMatrix normalize(const RMatrix& a);
CMatrix normalize(const CMatrix& a);

}  // namespace scatterkit
