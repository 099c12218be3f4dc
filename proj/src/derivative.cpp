#include "scatterkit/derivative.hpp"

#include <bit>
#include <string>

#include "scatterkit/error.hpp"
#include "scatterkit/parallel.hpp"
#include "support_solve.hpp"

namespace scatterkit {

namespace {

template <typename Kernel>
CMatrix solve_grid_system(const std::vector<Eigen::Index>& support, Kernel&& kernel,
                          const CMatrix& rhs, const KrylovOptions& opts, const CMatrix* guess,
                          int direction, const char* what) {
  detail::SupportSolve res = detail::solve_on_support(support, kernel, rhs, guess, opts);
  if (!res.info.converged) {
    throw NumericalError(std::string(what) + " solve for incident direction " +
                             std::to_string(direction) + " stalled at relative residual " +
                             detail::format_residual(res.info.relative_residual),
                         res.info.relative_residual);
  }
  return std::move(res.solution);
}

}  // namespace

LinearizationCache::LinearizationCache(const ContrastField& m, double k, const DirectionSet& inc,
                                       const SolverOptions& opts, WarmStart* warm)
    : LinearizationCache(VolumePotential(m.grid, k), m, inc, opts, warm) {}

LinearizationCache::LinearizationCache(const VolumePotential& potential, const ContrastField& m,
                                       const DirectionSet& inc, const SolverOptions& opts,
                                       WarmStart* warm)
    : contrast_(m), potential_(potential), incident_(inc), options_(opts),
      fields_{m.grid, potential.wave_number(), {}}, zero_(m.values.isZero(0.0)) {
  if (!(potential.grid() == m.grid)) {
    throw ConfigError("linearization: potential and contrast live on different grids");
  }
  key_ = content_hash(m.values) ^ std::bit_cast<std::uint64_t>(potential.wave_number());
  fields_.fields.resize(inc.count());
  if (warm != nullptr) warm->forward.resize(inc.count());
  parallel_for(inc.count(), opts.jobs, [&](int q) {
    const CMatrix* guess = nullptr;
    if (warm != nullptr && warm->forward[q].size() == m.values.size()) guess = &warm->forward[q];
    try {
      fields_.fields[q] =
          solve_total_field(potential_, contrast_.values, inc.direction(q), opts.krylov, guess)
              .field;
    } catch (const NumericalError& e) {
      throw NumericalError("incident direction " + std::to_string(q) + ": " + e.what(),
                           e.residual());
    }
    if (warm != nullptr) warm->forward[q] = fields_.fields[q];
  });
}

FarFieldMatrix LinearizationCache::far_field(const DirectionSet& obs) const {
  const FarFieldQuadrature quad(contrast_.grid, wave_number(), obs);
  CMatrix out(obs.count(), incident_.count());
  for (int q = 0; q < incident_.count(); ++q) {
    out.col(q) = quad.apply(contrast_.values.cwiseProduct(fields_.fields[q]));
  }
  return FarFieldMatrix(std::move(out), wave_number(), incident_, obs);
}

CMatrix frechet_apply(const LinearizationCache& cache, const CMatrix& q, const DirectionSet& obs) {
  const ContrastField& m = cache.contrast();
  if (q.rows() != m.grid.n() || q.cols() != m.grid.n()) {
    throw ConfigError("perturbation shape does not match the grid");
  }
  const double k = cache.wave_number();
  const double k2 = k * k;
  const VolumePotential& pot = cache.potential();
  const FarFieldQuadrature quad(m.grid, k, obs);
  const int count = cache.incident().count();
  const auto support = detail::nonzero_pixels(m.values);
  CMatrix out(obs.count(), count);
  parallel_for(count, cache.options().jobs, [&](int j) {
    const CMatrix& u = cache.total_fields().fields[j];
    CMatrix density = q.cwiseProduct(u);
    if (!cache.contrast_is_zero()) {
      const CMatrix rhs = k2 * pot.apply(density);
      const CMatrix v = solve_grid_system(
          support, [&](const CMatrix& x) -> CMatrix { return k2 * pot.apply(m.values.cwiseProduct(x)); },
          rhs, cache.options().krylov, nullptr, j, "linearized");
      density += m.values.cwiseProduct(v);
    }
    out.col(j) = quad.apply(density);
  });
  return out;
}

CMatrix frechet_adjoint_apply(const LinearizationCache& cache, const CMatrix& r,
                              const DirectionSet& obs, WarmStart* warm) {
  const ContrastField& m = cache.contrast();
  const int count = cache.incident().count();
  if (r.rows() != obs.count() || r.cols() != count) {
    throw ConfigError("residual is " + std::to_string(r.rows()) + "x" + std::to_string(r.cols()) +
                      ", expected " + std::to_string(obs.count()) + "x" + std::to_string(count));
  }
  const double k = cache.wave_number();
  const double k2 = k * k;
  const VolumePotential& pot = cache.potential();
  const FarFieldQuadrature quad(m.grid, k, obs);
  const CMatrix m_conj = m.values.conjugate();
  const auto support = detail::nonzero_pixels(m.values);
  if (warm != nullptr) warm->adjoint.resize(count);

  std::vector<CMatrix> terms(count);
  parallel_for(count, cache.options().jobs, [&](int j) {
    const CMatrix g = quad.adjoint(r.col(j));
    CMatrix psi = g;
    if (!cache.contrast_is_zero()) {
      // (I - k^2 T_m)^* y = conj(m) g, with (I - k^2 T M)^* = I - k^2 M^* T^*
      const CMatrix* guess = nullptr;
      if (warm != nullptr && warm->adjoint[j].size() == g.size()) guess = &warm->adjoint[j];
      const CMatrix y = solve_grid_system(
          support, [&](const CMatrix& x) -> CMatrix { return k2 * m_conj.cwiseProduct(pot.apply_adjoint(x)); },
          m_conj.cwiseProduct(g), cache.options().krylov, guess, j, "adjoint");
      if (warm != nullptr) warm->adjoint[j] = y;
      psi += k2 * pot.apply_adjoint(y);
    }
    terms[j] = cache.total_fields().fields[j].conjugate().cwiseProduct(psi);
  });
  CMatrix out = CMatrix::Zero(m.grid.n(), m.grid.n());
  for (const auto& t : terms) out += t;
  return out;
}

}  // namespace scatterkit
