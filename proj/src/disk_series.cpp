#include "scatterkit/disk_series.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>

#include "scatterkit/error.hpp"

namespace scatterkit {

namespace bm = boost::math;

Complex disk_scattering_coefficient(double n0, double radius, double k, int order) {
  const int n = std::abs(order);  // a_{-n} = a_n
  const double kappa = k * std::sqrt(n0);
  const double x = k * radius;
  const double y = kappa * radius;
  const double jx = bm::cyl_bessel_j(n, x);
  const double jxp = bm::cyl_bessel_j_prime(n, x);
  const Complex hx(jx, bm::cyl_neumann(n, x));
  const Complex hxp(jxp, bm::cyl_neumann_prime(n, x));
  const double jy = bm::cyl_bessel_j(n, y);
  const double jyp = bm::cyl_bessel_j_prime(n, y);
  const Complex num = k * jxp * jy - kappa * jx * jyp;
  const Complex den = kappa * hx * jyp - k * hxp * jy;
  return num / den;
}

namespace {

CMatrix series(double n0, double radius, double k, const DirectionSet& inc,
               const DirectionSet& obs, int truncation) {
  using std::numbers::pi;
  CMatrix out = CMatrix::Zero(obs.count(), inc.count());
  const Complex prefactor = std::sqrt(2.0 / (pi * k)) * std::polar(1.0, -pi / 4.0);
  for (int order = -truncation; order <= truncation; ++order) {
    const Complex a = disk_scattering_coefficient(n0, radius, k, order);
    for (int q = 0; q < inc.count(); ++q) {
      for (int p = 0; p < obs.count(); ++p) {
        out(p, q) += a * std::polar(1.0, order * (obs.angle(p) - inc.angle(q)));
      }
    }
  }
  return prefactor * out;
}

}  // namespace

FarFieldMatrix disk_series_far_field(double n0, double radius, double k, const DirectionSet& inc,
                                     const DirectionSet& obs, int truncation) {
  if (!(n0 > 0.0)) throw ConfigError("disk refractive index must be positive");
  if (!(radius > 0.0)) throw ConfigError("disk radius must be positive");
  if (!(k > 0.0)) throw ConfigError("wave number must be positive");
  const int minimum = static_cast<int>(std::ceil(k * radius)) + 10;
  if (truncation < minimum) {
    throw ConfigError("series truncation " + std::to_string(truncation) +
                      " is below the minimum " + std::to_string(minimum));
  }
  CMatrix result = series(n0, radius, k, inc, obs, truncation);
  const CMatrix refined = series(n0, radius, k, inc, obs, truncation + 5);
  const double tail = (refined - result).norm() / std::max(result.norm(), 1.0);
  if (!(tail < 1e-10)) {
    throw NumericalError("disk series not converged at truncation " + std::to_string(truncation) +
                             ": tail estimate " + std::to_string(tail),
                         tail);
  }
  return FarFieldMatrix(std::move(result), k, inc, obs);
}

ContrastField disk_contrast(const Grid& grid, double n0, double radius, int subsamples) {
  if (subsamples < 1) throw ConfigError("subsamples must be positive");
  const int n = grid.n();
  const double h = grid.spacing();
  const double r2 = radius * radius;
  CMatrix values = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Point c = grid.center(i, j);
      int hits = 0;
      for (int a = 0; a < subsamples; ++a) {
        const double x = c.x() + ((a + 0.5) / subsamples - 0.5) * h;
        for (int b = 0; b < subsamples; ++b) {
          const double y = c.y() + ((b + 0.5) / subsamples - 0.5) * h;
          if (x * x + y * y <= r2) ++hits;
        }
      }
      values(i, j) = (n0 - 1.0) * hits / static_cast<double>(subsamples * subsamples);
    }
  }
  return ContrastField(grid, std::move(values));
}

}  // namespace scatterkit
