#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "scatterkit/gmres.hpp"
#include "scatterkit/grid.hpp"

namespace scatterkit::detail {

inline std::string format_residual(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", r);
  return buf;
}

/// Column-major linear indices of the nonzero pixels of a contrast.
inline std::vector<Eigen::Index> nonzero_pixels(const CMatrix& m) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index t = 0; t < m.size(); ++t) {
    if (m.data()[t] != Complex(0.0)) idx.push_back(t);
  }
  return idx;
}

struct SupportSolve {
  CMatrix solution;
  KrylovResult info;  // relative_residual is measured against the full right-hand side
};

/// Solves z - K z = b where K z vanishes off `support` and depends on z only
/// through its values on `support` (K = k^2 T M or k^2 M^* T^* with M the
/// contrast). The Krylov iteration runs on the support values alone; the
/// remaining entries follow explicitly from z = b + K z, so the full-grid
/// residual equals the residual of the reduced system.
template <typename Kernel>
SupportSolve solve_on_support(const std::vector<Eigen::Index>& support, Kernel&& kernel,
                              const CMatrix& b, const CMatrix* guess, const KrylovOptions& opts) {
  const Eigen::Index n = b.rows();
  const auto s = static_cast<Eigen::Index>(support.size());
  auto scatter = [&](const CVector& x) {
    CMatrix full = CMatrix::Zero(n, n);
    for (Eigen::Index t = 0; t < s; ++t) full.data()[support[t]] = x(t);
    return full;
  };
  auto gather = [&](const CMatrix& full) {
    CVector x(s);
    for (Eigen::Index t = 0; t < s; ++t) x(t) = full.data()[support[t]];
    return x;
  };

  SupportSolve out;
  const CVector bs = gather(b);
  const double bnorm = b.norm();
  const double bsnorm = bs.norm();
  if (s == 0 || bsnorm == 0.0 || bnorm == 0.0) {
    // K z = 0 is consistent only with z_S = 0 here
    out.solution = b;
    out.info.converged = true;
    return out;
  }
  KrylovOptions reduced = opts;
  reduced.tolerance = std::min(opts.tolerance * bnorm / bsnorm, 0.5);
  auto op = [&](const CVector& x) -> CVector { return x - gather(kernel(scatter(x))); };
  CVector x0;
  if (guess != nullptr && guess->rows() == n && guess->cols() == n) x0 = gather(*guess);
  out.info = gmres(op, bs, x0.size() ? &x0 : nullptr, reduced);
  out.info.relative_residual *= bsnorm / bnorm;
  out.info.converged = out.info.relative_residual <= opts.tolerance;

  out.solution = b + kernel(scatter(out.info.x));
  for (Eigen::Index t = 0; t < s; ++t) out.solution.data()[support[t]] = out.info.x(t);
  return out;
}

}  // namespace scatterkit::detail
