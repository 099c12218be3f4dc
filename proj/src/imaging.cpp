#include "scatterkit/imaging.hpp"

#include <cmath>
#include <numbers>

namespace scatterkit {

namespace {

double quadrature_weight(const FarFieldMatrix& data) {
  using std::numbers::pi;
  return (2.0 * pi / data.incident.count()) * (2.0 * pi / data.observation.count());
}

}  // namespace

double imaging_value(const FarFieldMatrix& data, const Point& z) {
  const double k = data.wave_number;
  const int np = data.observation.count();
  CVector phase(np);
  for (int p = 0; p < np; ++p) phase(p) = std::polar(1.0, k * data.observation.direction(p).dot(z));
  double sum = 0.0;
  for (int q = 0; q < data.incident.count(); ++q) {
    Complex s(0.0);
    for (int p = 0; p < np; ++p) s += data.values(p, q) * phase(p);
    sum += std::norm(s);
  }
  return quadrature_weight(data) * sum;
}

ImagingMatrix imaging_matrix_pointwise(const FarFieldMatrix& data, const Grid& grid) {
  RMatrix values(grid.n(), grid.n());
  for (int j = 0; j < grid.n(); ++j) {
    for (int i = 0; i < grid.n(); ++i) values(i, j) = imaging_value(data, grid.center(i, j));
  }
  return {grid, std::move(values), data.wave_number};
}

ImagingMatrix imaging_matrix(const FarFieldMatrix& data, const Grid& grid) {
  const int n = grid.n();
  const int np = data.observation.count();
  const double k = data.wave_number;
  const Eigen::VectorXd c = grid.coordinates();
  CMatrix ex(n, np), ey(n, np);
  for (int p = 0; p < np; ++p) {
    const Point d = data.observation.direction(p);
    for (int i = 0; i < n; ++i) {
      ex(i, p) = std::polar(1.0, k * d.x() * c(i));
      ey(i, p) = std::polar(1.0, k * d.y() * c(i));
    }
  }
  const double w = quadrature_weight(data);
  RMatrix values(n, n);
  for (int i = 0; i < n; ++i) {
    // rows j, columns q: sum_p ey(j,p) ex(i,p) U(p,q)
    const CMatrix v = ey * (ex.row(i).transpose().asDiagonal() * data.values);
    values.row(i) = w * v.cwiseAbs2().rowwise().sum().transpose();
  }
  return {grid, std::move(values), k};
}

RMatrix normalize(const RMatrix& a) {
  const double m = a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
  return m == 0.0 ? a : RMatrix(a / m);
}

CMatrix normalize(const CMatrix& a) {
  const double m = max_modulus(a);
  return m == 0.0 ? a : CMatrix(a / m);
}

}  // namespace scatterkit
