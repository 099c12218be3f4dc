#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "scatterkit/grid.hpp"

namespace scatterkit {

struct KrylovOptions {
  double tolerance = 1e-8;  ///< relative residual ||b - A x|| / ||b||
  int max_iterations = 2000;
  int restart = 300;
};

struct KrylovResult {
  CVector x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Restarted GMRES for a matrix-free complex operator.
///
/// `apply(v)` must return A v. Modified Gram-Schmidt Arnoldi with Givens
/// rotations; the true residual is recomputed at every restart and the
/// solver only reports convergence on the true residual.
template <typename Apply>
KrylovResult gmres(Apply&& apply, const CVector& b, const CVector* x0,
                   const KrylovOptions& opts) {
  KrylovResult out;
  const Eigen::Index n = b.size();
  out.x = (x0 != nullptr) ? *x0 : CVector::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    out.x.setZero();
    out.converged = true;
    return out;
  }
  const int m = std::max(1, opts.restart);

  std::vector<CVector> basis(m + 1);
  Eigen::MatrixXcd hess = Eigen::MatrixXcd::Zero(m + 1, m);
  std::vector<double> cs(m);
  std::vector<Complex> sn(m);
  CVector g(m + 1);

  CVector r = b - apply(out.x);
  double rnorm = r.norm();
  out.relative_residual = rnorm / bnorm;
  while (true) {
    if (out.relative_residual <= opts.tolerance) {
      out.converged = true;
      return out;
    }
    if (out.iterations >= opts.max_iterations) return out;

    basis[0] = r / rnorm;
    g.setZero();
    g(0) = rnorm;
    hess.setZero();
    int j = 0;
    for (; j < m && out.iterations < opts.max_iterations; ++j) {
      ++out.iterations;
      CVector w = apply(basis[j]);
      for (int i = 0; i <= j; ++i) {
        hess(i, j) = basis[i].dot(w);  // conjugates basis[i]
        w -= hess(i, j) * basis[i];
      }
      const double wnorm = w.norm();
      hess(j + 1, j) = wnorm;
      for (int i = 0; i < j; ++i) {
        const Complex t = cs[i] * hess(i, j) + sn[i] * hess(i + 1, j);
        hess(i + 1, j) = -std::conj(sn[i]) * hess(i, j) + cs[i] * hess(i + 1, j);
        hess(i, j) = t;
      }
      // rotation annihilating hess(j+1, j)
      const Complex a = hess(j, j);
      const double bb = wnorm;
      const double denom = std::hypot(std::abs(a), bb);
      if (denom == 0.0) {
        cs[j] = 1.0;
        sn[j] = 0.0;
      } else if (std::abs(a) == 0.0) {
        cs[j] = 0.0;
        sn[j] = 1.0;
      } else {
        cs[j] = std::abs(a) / denom;
        sn[j] = (a / std::abs(a)) * bb / denom;
      }
      hess(j, j) = cs[j] * a + sn[j] * bb;
      hess(j + 1, j) = 0.0;
      g(j + 1) = -std::conj(sn[j]) * g(j);
      g(j) = cs[j] * g(j);

      if (wnorm > 0.0) basis[j + 1] = w / wnorm;
      if (std::abs(g(j + 1)) / bnorm <= opts.tolerance * 0.5 || wnorm == 0.0) {
        ++j;
        break;
      }
    }
    // back substitution on the j x j upper-triangular system
    CVector y(j);
    for (int i = j - 1; i >= 0; --i) {
      Complex s = g(i);
      for (int l = i + 1; l < j; ++l) s -= hess(i, l) * y(l);
      y(i) = s / hess(i, i);
    }
    for (int i = 0; i < j; ++i) out.x += y(i) * basis[i];

    r = b - apply(out.x);
    rnorm = r.norm();
    out.relative_residual = rnorm / bnorm;
  }
}

}  // namespace scatterkit
