#include "scatterkit/grid.hpp"

#include <cmath>
#include <numbers>

#include "scatterkit/error.hpp"

namespace scatterkit {

Grid::Grid(double rho, int n) : rho_(rho), n_(n) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw ConfigError("grid half-width rho must be positive, got " + std::to_string(rho));
  }
  if (n < 2) {
    throw ConfigError("grid needs at least 2 pixels per side, got " + std::to_string(n));
  }
}

Eigen::VectorXd Grid::coordinates() const {
  Eigen::VectorXd c(n_);
  for (int i = 0; i < n_; ++i) c(i) = coordinate(i);
  return c;
}

DirectionSet::DirectionSet(int count) : count_(count) {
  if (count < 1) {
    throw ConfigError("direction count must be positive, got " + std::to_string(count));
  }
}

double DirectionSet::angle(int j) const {
  return 2.0 * std::numbers::pi * j / count_;
}

Point DirectionSet::direction(int j) const {
  const double t = angle(j);
  return {std::cos(t), std::sin(t)};
}

ContrastField::ContrastField(Grid g, CMatrix v) : grid(g), values(std::move(v)) {
  if (values.rows() != grid.n() || values.cols() != grid.n()) {
    throw ConfigError("contrast matrix is " + std::to_string(values.rows()) + "x" +
                      std::to_string(values.cols()) + ", grid expects " +
                      std::to_string(grid.n()) + "x" + std::to_string(grid.n()));
  }
}

ContrastField ContrastField::zero(const Grid& g) {
  return ContrastField(g, CMatrix::Zero(g.n(), g.n()));
}

bool ContrastField::supported_in_disk() const {
  const double r2 = grid.rho() * grid.rho();
  for (int j = 0; j < grid.n(); ++j) {
    for (int i = 0; i < grid.n(); ++i) {
      const Point x = grid.center(i, j);
      if (x.squaredNorm() >= r2 && values(i, j) != Complex(0.0, 0.0)) return false;
    }
  }
  return true;
}

FarFieldMatrix::FarFieldMatrix(CMatrix v, double k, DirectionSet inc, DirectionSet obs,
                               double delta)
    : values(std::move(v)), wave_number(k), incident(inc), observation(obs),
      noise_level(delta) {
  if (values.rows() != observation.count() || values.cols() != incident.count()) {
    throw ConfigError("far-field matrix is " + std::to_string(values.rows()) + "x" +
                      std::to_string(values.cols()) + " but direction sets are P=" +
                      std::to_string(observation.count()) +
                      ", Q=" + std::to_string(incident.count()));
  }
  if (!(k > 0.0)) throw ConfigError("wave number must be positive");
  if (delta < 0.0) throw ConfigError("noise level must be nonnegative");
}

double max_modulus(const CMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

namespace {

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

template <typename M>
std::uint64_t hash_matrix(const M& a) {
  std::uint64_t h = 14695981039346656037ULL;
  const std::int64_t shape[2] = {a.rows(), a.cols()};
  h = fnv1a(shape, sizeof(shape), h);
  return fnv1a(a.data(), sizeof(typename M::Scalar) * static_cast<std::size_t>(a.size()), h);
}

}  // namespace

std::uint64_t content_hash(const CMatrix& a) { return hash_matrix(a); }
std::uint64_t content_hash(const RMatrix& a) { return hash_matrix(a); }

}  // namespace scatterkit
