#pragma once

#include <cstdint>
#include <vector>

#include "scatterkit/gmres.hpp"
#include "scatterkit/grid.hpp"
#include "scatterkit/volume_potential.hpp"

namespace scatterkit {

struct SolverOptions {
  KrylovOptions krylov{};
  int jobs = 0;  ///< worker cap for per-direction solves; 0 = resolve_jobs()
};

/// Plane wave exp(i k x . d) sampled at the pixel centers.
CMatrix incident_field(const Grid& grid, double k, const Point& d);

struct FieldSolution {
  CMatrix field;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Solves (I - k^2 T_m) u = u^i for the total field.
///
/// `initial_guess` warm-starts the Krylov iteration. Throws NumericalError
/// carrying the final residual when the tolerance is not met.
FieldSolution solve_total_field(const VolumePotential& potential, const CMatrix& contrast,
                                const Point& d, const KrylovOptions& opts,
                                const CMatrix* initial_guess = nullptr);

FieldSolution solve_total_field(const ContrastField& m, const Point& d, double k,
                                const KrylovOptions& opts);

/// Midpoint quadrature of
///   u_inf(x_p) = k^{3/2} e^{i pi/4} / sqrt(8 pi) * sum_ij e^{-i k x_p . x_ij} f_ij h^2
/// for a density f on the grid, exploiting the separable exponential.
class FarFieldQuadrature {
 public:
  FarFieldQuadrature(const Grid& grid, double k, const DirectionSet& obs);

  const Grid& grid() const { return grid_; }
  const DirectionSet& observation() const { return obs_; }

  /// Far field of the source density f (f = m u for the scattered field).
  CVector apply(const CMatrix& density) const;
  /// Exact adjoint of apply() in the unweighted Euclidean inner products.
  CMatrix adjoint(const CVector& r) const;

 private:
  Grid grid_;
  DirectionSet obs_;
  Complex scale_;
  CMatrix phase_x_;  // n x P, e^{-i k cos(t_p) x_i}
  CMatrix phase_y_;  // n x P, e^{-i k sin(t_p) y_j}
};

Complex far_field_constant(double k);

/// u_inf(x_p) for one incident direction from its total field u.
CVector far_field_from_field(const ContrastField& m, const CMatrix& u, const DirectionSet& obs,
                             double k);

/// Discrete far-field operator F(m): one Lippmann-Schwinger solve per column.
FarFieldMatrix far_field_operator(const ContrastField& m, double k, const DirectionSet& inc,
                                  const DirectionSet& obs, const SolverOptions& opts = {});

/// Same as far_field_operator but also returns the total fields.
FarFieldMatrix far_field_operator(const ContrastField& m, double k, const DirectionSet& inc,
                                  const DirectionSet& obs, const SolverOptions& opts,
                                  TotalFieldSet* fields);

/// Born approximation F_b(m): u replaced by u^i, no linear solve.
FarFieldMatrix born_far_field(const ContrastField& m, double k, const DirectionSet& inc,
                              const DirectionSet& obs);

/// Adds complex Gaussian noise E scaled so ||E||_F = delta ||U||_F exactly.
/// delta = 0 returns the input unchanged; U = 0 with delta > 0 returns U and
/// writes a warning to stderr.
FarFieldMatrix add_noise(const FarFieldMatrix& data, double delta, std::uint64_t seed);

}  // namespace scatterkit
