#include "scatterkit/inversion.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "scatterkit/error.hpp"

namespace scatterkit {

namespace {

enum class Method { Landweber, Projected, Variational };

Reconstruction iterate(const FarFieldMatrix& data, const Grid& grid, const SupportMask* mask,
                       Method method, int steps, const ReconstructionConfig& cfg,
                       const InversionHooks& hooks) {
  cfg.validate();
  if (std::abs(data.wave_number - cfg.k) > 1e-12 * std::max(1.0, cfg.k)) {
    throw ConfigError("data wave number " + std::to_string(data.wave_number) +
                      " differs from configured k = " + std::to_string(cfg.k));
  }
  if (mask != nullptr && !(mask->grid == grid)) throw ConfigError("mask grid differs from inversion grid");
  if (hooks.truth != nullptr && !(hooks.truth->grid == grid)) {
    throw ConfigError("truth grid differs from inversion grid");
  }

  SolverOptions opts;
  opts.krylov.tolerance = cfg.solver_tolerance;
  opts.jobs = cfg.jobs;
  const VolumePotential potential(grid, cfg.k);
  WarmStart warm;

  CMatrix m = CMatrix::Zero(grid.n(), grid.n());
  IterateTrace trace;
  for (int i = 0; i < steps; ++i) {
    std::optional<LinearizationCache> cache;
    try {
      cache.emplace(potential, ContrastField(grid, m), data.incident, opts, &warm);
    } catch (const NumericalError& e) {
      throw NumericalError("iteration " + std::to_string(i) + ": " + e.what(), e.residual());
    }
    const CMatrix residual = cache->far_field(data.observation).values - data.values;
    trace.residual.push_back(residual.norm());
    trace.regularization.push_back(mask ? support_penalty(*mask, m) : 0.0);

    CMatrix gradient;
    try {
      gradient = frechet_adjoint_apply(*cache, residual, data.observation, &warm);
    } catch (const NumericalError& e) {
      throw NumericalError("iteration " + std::to_string(i) + ": " + e.what(), e.residual());
    }
    switch (method) {
      case Method::Landweber:
        m -= cfg.mu * gradient;
        break;
      case Method::Projected:
        m = project(*mask, m - cfg.mu * gradient);
        break;
      case Method::Variational:
        m -= cfg.mu * (gradient + cfg.lambda * (m - project(*mask, m)));
        break;
    }

    if (!m.allFinite()) {
      throw NumericalError("iteration " + std::to_string(i) + " produced a non-finite iterate; "
                           "the stepsize mu is likely too large");
    }
    const double peak = max_modulus(m);
    if (peak > cfg.divergence_limit) {
      throw NumericalError("iteration " + std::to_string(i) + " diverged: max|m| = " +
                           std::to_string(peak));
    }
    if (hooks.truth != nullptr) {
      trace.relative_error.push_back(relative_error_of_contrast(hooks.truth->values, m));
    }
    if (hooks.observer) hooks.observer(i + 1, m);
  }
  return {ContrastField(grid, std::move(m)), std::move(trace)};
}

}  // namespace

void ReconstructionConfig::validate() const {
  if (!(k > 0.0)) throw ConfigError("k must be positive");
  if (!(k0 > 0.0)) throw ConfigError("k0 must be positive");
  if (!(mu > 0.0)) throw ConfigError("stepsize mu must be positive");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be nonnegative");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
  if (iters_projected < 1 || iters_variational < 1) {
    throw ConfigError("iteration counts must be at least 1");
  }
  if (!(solver_tolerance > 0.0 && solver_tolerance < 1.0)) {
    throw ConfigError("solver tolerance must lie in (0, 1)");
  }
}

CMatrix project(const SupportMask& mask, const CMatrix& f) {
  if (f.rows() != mask.values.rows() || f.cols() != mask.values.cols()) {
    throw ConfigError("projection: mask and matrix shapes differ");
  }
  return f.cwiseProduct(mask.values.cast<Complex>());
}

double support_penalty(const SupportMask& mask, const CMatrix& f) {
  return 0.5 * (f - project(mask, f)).squaredNorm();
}

Reconstruction projected_landweber(const FarFieldMatrix& data, const SupportMask& mask,
                                   const ReconstructionConfig& cfg, const InversionHooks& hooks) {
  return iterate(data, mask.grid, &mask, Method::Projected, cfg.iters_projected, cfg, hooks);
}

Reconstruction landweber(const FarFieldMatrix& data, const Grid& grid,
                         const ReconstructionConfig& cfg, const InversionHooks& hooks) {
  return iterate(data, grid, nullptr, Method::Landweber, cfg.iters_projected, cfg, hooks);
}

Reconstruction variational_gd(const FarFieldMatrix& data, const SupportMask& mask,
                              const ReconstructionConfig& cfg, const InversionHooks& hooks) {
  return iterate(data, mask.grid, &mask, Method::Variational, cfg.iters_variational, cfg, hooks);
}

double relative_error(const CMatrix& n_true, const CMatrix& n_hat) {
  if (n_true.rows() != n_hat.rows() || n_true.cols() != n_hat.cols()) {
    throw ConfigError("relative error: shapes differ");
  }
  double sum = 0.0;
  for (Eigen::Index c = 0; c < n_true.cols(); ++c) {
    for (Eigen::Index r = 0; r < n_true.rows(); ++r) {
      if (n_true(r, c) == Complex(0.0, 0.0)) {
        throw ConfigError("relative error: refractive index vanishes at (" + std::to_string(r) +
                          ", " + std::to_string(c) + ")");
      }
      sum += std::norm((n_true(r, c) - n_hat(r, c)) / n_true(r, c));
    }
  }
  return std::sqrt(sum / static_cast<double>(n_true.size()));
}

double relative_error_of_contrast(const CMatrix& m_true, const CMatrix& m_hat) {
  const CMatrix one = CMatrix::Ones(m_true.rows(), m_true.cols());
  return relative_error(m_true + one, m_hat + one);
}

}  // namespace scatterkit
