#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "scatterkit/forward.hpp"

namespace scatterkit {

/// Previous solutions used as Krylov initial guesses across outer iterations.
/// Purely a performance aid: results still satisfy the solver tolerance.
struct WarmStart {
  std::vector<CMatrix> forward;
  std::vector<CMatrix> adjoint;
};

/// Total fields u(., d_q) for one contrast and wave number, solved once and
/// reused by F(m), F'(m) q and F'(m)^* r. Immutable after construction.
class LinearizationCache {
 public:
  LinearizationCache(const ContrastField& m, double k, const DirectionSet& inc,
                     const SolverOptions& opts = {}, WarmStart* warm = nullptr);
  LinearizationCache(const VolumePotential& potential, const ContrastField& m,
                     const DirectionSet& inc, const SolverOptions& opts = {},
                     WarmStart* warm = nullptr);

  const ContrastField& contrast() const { return contrast_; }
  double wave_number() const { return potential_.wave_number(); }
  const DirectionSet& incident() const { return incident_; }
  const TotalFieldSet& total_fields() const { return fields_; }
  const VolumePotential& potential() const { return potential_; }
  const SolverOptions& options() const { return options_; }
  /// Hash of the contrast values and the wave number.
  std::uint64_t key() const { return key_; }
  bool contrast_is_zero() const { return zero_; }

  /// F(m) at the observation directions, from the cached fields.
  FarFieldMatrix far_field(const DirectionSet& obs) const;

 private:
  ContrastField contrast_;
  VolumePotential potential_;
  DirectionSet incident_;
  SolverOptions options_;
  TotalFieldSet fields_;
  std::uint64_t key_;
  bool zero_;
};

/// F'(m) q: P x Q matrix of far fields of the linearized scattered field.
CMatrix frechet_apply(const LinearizationCache& cache, const CMatrix& q, const DirectionSet& obs);

/// [F'(m)]^* r, the exact adjoint of frechet_apply under unweighted
/// Frobenius inner products. The per-direction adjoint Lippmann-Schwinger
/// systems reuse `warm` (if given) as initial guesses and store their
/// solutions back into it.
CMatrix frechet_adjoint_apply(const LinearizationCache& cache, const CMatrix& r,
                              const DirectionSet& obs, WarmStart* warm = nullptr);

}  // namespace scatterkit
