#include "scatterkit/forward.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <string>

#include "scatterkit/error.hpp"
#include "scatterkit/parallel.hpp"
#include "scatterkit/rng.hpp"
#include "support_solve.hpp"

namespace scatterkit {

CMatrix incident_field(const Grid& grid, double k, const Point& d) {
  const Eigen::VectorXd c = grid.coordinates();
  const int n = grid.n();
  CVector ex(n), ey(n);
  for (int i = 0; i < n; ++i) {
    ex(i) = std::polar(1.0, k * d.x() * c(i));
    ey(i) = std::polar(1.0, k * d.y() * c(i));
  }
  return ex * ey.transpose();
}

FieldSolution solve_total_field(const VolumePotential& potential, const CMatrix& contrast,
                                const Point& d, const KrylovOptions& opts,
                                const CMatrix* initial_guess) {
  const Grid& grid = potential.grid();
  const double k = potential.wave_number();
  if (contrast.rows() != grid.n() || contrast.cols() != grid.n()) {
    throw ConfigError("contrast does not match the potential's grid");
  }
  if (!(opts.tolerance > 0.0 && opts.tolerance < 1.0)) {
    throw ConfigError("solver tolerance must lie in (0, 1)");
  }
  const CMatrix ui = incident_field(grid, k, d);
  if (contrast.isZero(0.0)) return {ui, 0, 0.0};

  const double k2 = k * k;
  const auto support = detail::nonzero_pixels(contrast);
  const detail::SupportSolve res = detail::solve_on_support(
      support, [&](const CMatrix& w) -> CMatrix { return k2 * potential.apply(contrast.cwiseProduct(w)); },
      ui, initial_guess, opts);
  if (!res.info.converged) {
    throw NumericalError("Lippmann-Schwinger solve stalled at relative residual " +
                             detail::format_residual(res.info.relative_residual) + " after " +
                             std::to_string(res.info.iterations) + " iterations",
                         res.info.relative_residual);
  }
  return {res.solution, res.info.iterations, res.info.relative_residual};
}

FieldSolution solve_total_field(const ContrastField& m, const Point& d, double k,
                                const KrylovOptions& opts) {
  return solve_total_field(VolumePotential(m.grid, k), m.values, d, opts);
}

Complex far_field_constant(double k) {
  using std::numbers::pi;
  return std::pow(k, 1.5) * std::polar(1.0, pi / 4.0) / std::sqrt(8.0 * pi);
}

FarFieldQuadrature::FarFieldQuadrature(const Grid& grid, double k, const DirectionSet& obs)
    : grid_(grid), obs_(obs), scale_(far_field_constant(k) * grid.pixel_area()) {
  const Eigen::VectorXd c = grid.coordinates();
  const int n = grid.n();
  const int p = obs.count();
  phase_x_.resize(n, p);
  phase_y_.resize(n, p);
  for (int q = 0; q < p; ++q) {
    const Point dir = obs.direction(q);
    for (int i = 0; i < n; ++i) {
      phase_x_(i, q) = std::polar(1.0, -k * dir.x() * c(i));
      phase_y_(i, q) = std::polar(1.0, -k * dir.y() * c(i));
    }
  }
}

CVector FarFieldQuadrature::apply(const CMatrix& density) const {
  if (density.rows() != grid_.n() || density.cols() != grid_.n()) {
    throw ConfigError("far-field quadrature: density shape does not match the grid");
  }
  // sum_i phase_x(i,p) sum_j f(i,j) phase_y(j,p)
  const CMatrix fy = density * phase_y_;
  return scale_ * phase_x_.cwiseProduct(fy).colwise().sum().transpose();
}

CMatrix FarFieldQuadrature::adjoint(const CVector& r) const {
  if (r.size() != obs_.count()) {
    throw ConfigError("far-field adjoint: residual length does not match the observation set");
  }
  // conj(scale) sum_p r_p conj(phase_x(i,p)) conj(phase_y(j,p))
  const CMatrix weighted = phase_x_.conjugate() * r.asDiagonal();
  return std::conj(scale_) * (weighted * phase_y_.adjoint());
}

CVector far_field_from_field(const ContrastField& m, const CMatrix& u, const DirectionSet& obs,
                             double k) {
  if (u.rows() != m.values.rows() || u.cols() != m.values.cols()) {
    throw ConfigError("total field and contrast have different shapes");
  }
  return FarFieldQuadrature(m.grid, k, obs).apply(m.values.cwiseProduct(u));
}

FarFieldMatrix far_field_operator(const ContrastField& m, double k, const DirectionSet& inc,
                                  const DirectionSet& obs, const SolverOptions& opts) {
  return far_field_operator(m, k, inc, obs, opts, nullptr);
}

FarFieldMatrix far_field_operator(const ContrastField& m, double k, const DirectionSet& inc,
                                  const DirectionSet& obs, const SolverOptions& opts,
                                  TotalFieldSet* fields) {
  const VolumePotential potential(m.grid, k);
  const FarFieldQuadrature quad(m.grid, k, obs);
  CMatrix out(obs.count(), inc.count());
  std::vector<CMatrix> us(inc.count());
  parallel_for(inc.count(), opts.jobs, [&](int q) {
    try {
      us[q] = solve_total_field(potential, m.values, inc.direction(q), opts.krylov).field;
    } catch (const NumericalError& e) {
      throw NumericalError("incident direction " + std::to_string(q) + ": " + e.what(),
                           e.residual());
    }
    out.col(q) = quad.apply(m.values.cwiseProduct(us[q]));
  });
  if (fields != nullptr) *fields = TotalFieldSet{m.grid, k, std::move(us)};
  return FarFieldMatrix(std::move(out), k, inc, obs);
}

FarFieldMatrix born_far_field(const ContrastField& m, double k, const DirectionSet& inc,
                              const DirectionSet& obs) {
  const FarFieldQuadrature quad(m.grid, k, obs);
  CMatrix out(obs.count(), inc.count());
  for (int q = 0; q < inc.count(); ++q) {
    out.col(q) = quad.apply(m.values.cwiseProduct(incident_field(m.grid, k, inc.direction(q))));
  }
  return FarFieldMatrix(std::move(out), k, inc, obs);
}

FarFieldMatrix add_noise(const FarFieldMatrix& data, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw ConfigError("noise level must be a finite nonnegative number");
  }
  FarFieldMatrix out = data;
  if (delta == 0.0) return out;
  const double unorm = data.values.norm();
  if (unorm == 0.0) {
    std::cerr << "warning: relative noise is undefined for zero data; returning input unchanged\n";
    return out;
  }
  Rng rng(seed);
  CMatrix e(data.values.rows(), data.values.cols());
  for (Eigen::Index c = 0; c < e.cols(); ++c) {
    for (Eigen::Index r = 0; r < e.rows(); ++r) {
      const double re = rng.normal();
      const double im = rng.normal();
      e(r, c) = Complex(re, im);
    }
  }
  e *= delta * unorm / e.norm();
  out.values += e;
  out.noise_level = delta;
  return out;
}

}  // namespace scatterkit
