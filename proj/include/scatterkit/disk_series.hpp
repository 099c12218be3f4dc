#pragma once

#include "scatterkit/grid.hpp"

namespace scatterkit {

/// Far field of a plane wave scattered by a homogeneous penetrable disk
/// (refractive index n0, given radius, centered at the origin), from the
/// separation-of-variables series in cylindrical harmonics of order
/// -truncation..truncation.
///
/// Requires truncation >= ceil(k radius) + 10. The result is accepted only if
/// raising the truncation by 5 changes it by less than 1e-10 (relative
/// Frobenius); otherwise NumericalError carries the observed tail size.
FarFieldMatrix disk_series_far_field(double n0, double radius, double k, const DirectionSet& inc,
                                     const DirectionSet& obs, int truncation);

/// Coefficient of the scattered field in H_order^(1)(k r) e^{i order (phi - phi_d)} i^order.
Complex disk_scattering_coefficient(double n0, double radius, double k, int order);

/// Area-weighted rasterization of the disk: each pixel holds (n0 - 1) times
/// the covered fraction of its cell, estimated with `subsamples`^2 points.
ContrastField disk_contrast(const Grid& grid, double n0, double radius, int subsamples = 16);

}  // namespace scatterkit
