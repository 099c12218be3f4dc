#include <cmath>
#include <string>

#include "doctest.h"
#include "helpers.hpp"
#include "scatterkit/derivative.hpp"
#include "scatterkit/error.hpp"

using namespace scatterkit;
using testutil::random_matrix;
using testutil::rel;

namespace {

double adjoint_gap(const LinearizationCache& cache, const DirectionSet& obs, std::uint64_t seed) {
  const int n = cache.contrast().grid.n();
  const CMatrix q = random_matrix(n, n, seed);
  const CMatrix r = random_matrix(obs.count(), cache.incident().count(), seed + 1000);
  const Complex lhs = inner(frechet_apply(cache, q, obs), r);
  const Complex rhs = inner(q, frechet_adjoint_apply(cache, r, obs));
  return std::abs(lhs - rhs) / (q.norm() * r.norm());
}

}  // namespace

TEST_CASE("zero arguments map to zero") {
  const Grid g(3.0, 16);
  const DirectionSet inc(4), obs(8);
  const LinearizationCache cache(testutil::two_ellipses(g, 2.0), 1.0, inc);
  CHECK(frechet_apply(cache, CMatrix::Zero(16, 16), obs).isZero(0.0));
  CHECK(frechet_adjoint_apply(cache, CMatrix::Zero(8, 4), obs).isZero(0.0));
  CHECK_THROWS_AS(frechet_apply(cache, CMatrix::Zero(15, 16), obs), ConfigError);
  CHECK_THROWS_AS(frechet_adjoint_apply(cache, CMatrix::Zero(8, 5), obs), ConfigError);
}

TEST_CASE("derivative at zero contrast is the Born map") {
  const Grid g(3.0, 20);
  const DirectionSet inc(6), obs(10);
  const LinearizationCache cache(ContrastField::zero(g), 1.5, inc);
  CHECK(cache.contrast_is_zero());
  const CMatrix q = random_matrix(20, 20, 5);
  const CMatrix lin = frechet_apply(cache, q, obs);
  const CMatrix born = born_far_field(ContrastField(g, q), 1.5, inc, obs).values;
  CHECK(rel(lin, born) < 1e-14);
}

TEST_CASE("cache fields and far field agree with the forward operator") {
  const Grid g(3.0, 24);
  const DirectionSet inc(4), obs(8);
  const ContrastField m = testutil::two_ellipses(g, 2.0);
  const LinearizationCache cache(m, 1.0, inc);
  const FarFieldMatrix direct = far_field_operator(m, 1.0, inc, obs, {});
  CHECK(cache.far_field(obs).values == direct.values);
  CHECK(cache.total_fields().fields.size() == 4);

  const LinearizationCache other_k(m, 2.0, inc);
  CHECK(cache.key() != other_k.key());
  ContrastField m2 = m;
  m2.values(3, 3) += 1e-9;
  CHECK(LinearizationCache(m2, 1.0, inc).key() != cache.key());
  CHECK_THROWS_AS(LinearizationCache(VolumePotential(Grid(3.0, 20), 1.0), m, inc), ConfigError);
}

TEST_CASE("both maps are linear") {
  const Grid g(3.0, 20);
  const DirectionSet inc(4), obs(8);
  const LinearizationCache cache(testutil::two_ellipses(g, 3.0), 1.0, inc);
  const CMatrix q1 = random_matrix(20, 20, 1), q2 = random_matrix(20, 20, 2);
  const Complex a(0.3, -1.7);
  const CMatrix f1 = frechet_apply(cache, q1, obs), f2 = frechet_apply(cache, q2, obs);
  CHECK(rel(frechet_apply(cache, q1 + a * q2, obs), f1 + a * f2) < 1e-7);
  const CMatrix r1 = random_matrix(8, 4, 3), r2 = random_matrix(8, 4, 4);
  const CMatrix g1 = frechet_adjoint_apply(cache, r1, obs), g2 = frechet_adjoint_apply(cache, r2, obs);
  CHECK(rel(frechet_adjoint_apply(cache, r1 + a * r2, obs), g1 + a * g2) < 1e-7);
}

TEST_CASE("adjoint identity on 16, 40 and 80 point grids") {
  const DirectionSet inc(16), obs(32);
  for (int n : {16, 40, 80}) {
    const Grid g(3.0, n);
    for (const ContrastField& m : {ContrastField::zero(g), testutil::two_ellipses(g, 3.0)}) {
      const LinearizationCache cache(m, 1.0, inc);
      const int pairs = n == 40 ? 10 : 3;
      double worst = 0.0;
      for (int s = 0; s < pairs; ++s) worst = std::max(worst, adjoint_gap(cache, obs, 17 * n + s));
      MESSAGE("n = " << n << std::string(cache.contrast_is_zero() ? " zero" : " ellipses") << ": " << worst);
      CHECK(worst < 1e-8);
    }
  }
}

TEST_CASE("Born adjoint equals the dense conjugate transpose") {
  const Grid g(3.0, 16);
  const int n = 16;
  const double k = 2.0;
  const DirectionSet inc(4), obs(6);
  const LinearizationCache cache(ContrastField::zero(g), k, inc);

  // dense Born matrix assembled from the quadrature formula
  const Complex c = far_field_constant(k) * g.pixel_area();
  CMatrix born(obs.count() * inc.count(), n * n);
  for (int q = 0; q < inc.count(); ++q) {
    for (int p = 0; p < obs.count(); ++p) {
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          const Point x = g.center(i, j);
          born(q * obs.count() + p, j * n + i) =
              c * std::polar(1.0, k * (inc.direction(q) - obs.direction(p)).dot(x));
        }
      }
    }
  }
  double worst = 0.0;
  for (int q = 0; q < inc.count(); ++q) {
    for (int p = 0; p < obs.count(); ++p) {
      CMatrix r = CMatrix::Zero(obs.count(), inc.count());
      r(p, q) = 1.0;
      const CMatrix adj = frechet_adjoint_apply(cache, r, obs);
      for (int t = 0; t < n * n; ++t) {
        worst = std::max(worst, std::abs(adj.data()[t] - std::conj(born(q * obs.count() + p, t))));
      }
    }
  }
  CHECK(worst < 1e-10);
  // and the forward map agrees with the same matrix
  const CMatrix qv = random_matrix(n, n, 8);
  const CMatrix lin = frechet_apply(cache, qv, obs);
  const CVector dense = born * Eigen::Map<const CVector>(qv.data(), n * n);
  CHECK((Eigen::Map<const CVector>(lin.data(), lin.size()) - dense).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("finite differences are second order") {
  const Grid g(3.0, 40);
  const DirectionSet inc(16), obs(32);
  const ContrastField m = testutil::two_ellipses(g, 3.0);
  const CMatrix q = random_matrix(40, 40, 21).cwiseProduct(m.values.cwiseAbs().cast<Complex>()) / 3.0;
  const LinearizationCache cache(m, 1.0, inc);
  const CMatrix f0 = cache.far_field(obs).values;
  const CMatrix dq = frechet_apply(cache, q, obs);
  auto fd_error = [&](double h) {
    const CMatrix fh = far_field_operator(ContrastField(g, m.values + h * q), 1.0, inc, obs, {}).values;
    return (fh - f0 - h * dq).norm();
  };
  const double ratio = fd_error(1e-3) / fd_error(2e-3);
  MESSAGE("error ratio " << ratio);
  CHECK(ratio == doctest::Approx(0.25).epsilon(0.2));
}

TEST_CASE("adjoint of the residual is the gradient of the misfit") {
  const Grid g(3.0, 20);
  const DirectionSet inc(4), obs(8);
  SolverOptions opts;
  opts.krylov.tolerance = 1e-12;
  const ContrastField m = testutil::two_ellipses(g, 1.5);
  const CMatrix data = random_matrix(8, 4, 31) * 0.1;
  auto misfit = [&](const CMatrix& v) {
    return 0.5 * (far_field_operator(ContrastField(g, v), 1.0, inc, obs, opts).values - data).squaredNorm();
  };
  const LinearizationCache cache(m, 1.0, inc, opts);
  const CMatrix gradient = frechet_adjoint_apply(cache, cache.far_field(obs).values - data, obs);
  for (int s = 0; s < 5; ++s) {
    const CMatrix dir = random_matrix(20, 20, 40 + s);
    const double t = 1e-4;
    const double fd = (misfit(m.values + t * dir) - misfit(m.values - t * dir)) / (2.0 * t);
    const double predicted = inner(dir, gradient).real();
    CHECK(std::abs(fd - predicted) / std::abs(predicted) < 1e-4);
  }
}

TEST_CASE("warm starts reproduce cold solutions") {
  const Grid g(3.0, 32);
  const DirectionSet inc(8), obs(16);
  const ContrastField m = testutil::two_ellipses(g, 3.0);
  WarmStart warm;
  const LinearizationCache first(m, 1.0, inc, {}, &warm);
  CHECK(warm.forward.size() == 8);
  ContrastField moved = m;
  moved.values *= 1.01;
  const LinearizationCache cold(moved, 1.0, inc);
  const LinearizationCache hot(moved, 1.0, inc, {}, &warm);
  CHECK(rel(hot.far_field(obs).values, cold.far_field(obs).values) < 1e-7);

  const CMatrix r = random_matrix(16, 8, 9);
  const CMatrix a = frechet_adjoint_apply(cold, r, obs);
  frechet_adjoint_apply(first, r, obs, &warm);
  const CMatrix b = frechet_adjoint_apply(hot, r, obs, &warm);
  CHECK(rel(b, a) < 1e-7);
}
