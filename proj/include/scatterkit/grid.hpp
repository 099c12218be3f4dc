#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace scatterkit {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using Point = Eigen::Vector2d;

/// Uniform pixelization of the square C_rho = [-rho, rho]^2 into n x n cells.
///
/// Matrices defined on a grid are indexed (i, j) with i running along the
/// x axis and j along the y axis; zero-based index i has center coordinate
/// -rho + (i + 1/2) h.
class Grid {
 public:
  Grid(double rho, int n);

  double rho() const { return rho_; }
  int n() const { return n_; }
  double spacing() const { return 2.0 * rho_ / n_; }
  double pixel_area() const { return spacing() * spacing(); }
  double coordinate(int i) const { return -rho_ + (i + 0.5) * spacing(); }
  Point center(int i, int j) const { return {coordinate(i), coordinate(j)}; }

  /// Pixel-center coordinates along one axis.
  Eigen::VectorXd coordinates() const;

  bool operator==(const Grid& other) const = default;

 private:
  double rho_;
  int n_;
};

/// `count` directions on the unit circle at angles 2*pi*j/count.
class DirectionSet {
 public:
  explicit DirectionSet(int count);

  int count() const { return count_; }
  double angle(int j) const;
  Point direction(int j) const;

  bool operator==(const DirectionSet& other) const = default;

 private:
  int count_;
};

/// Sampled contrast m = n - 1 at the pixel centers of a grid.
struct ContrastField {
  Grid grid;
  CMatrix values;

  ContrastField(Grid g, CMatrix v);
  static ContrastField zero(const Grid& g);

  /// True when every pixel whose center lies outside the open disk B_rho
  /// holds an exact zero.
  bool supported_in_disk() const;
};

/// Far-field measurements u(x_p, d_q): rows are observation directions,
/// columns incident directions.
struct FarFieldMatrix {
  CMatrix values;
  double wave_number;
  DirectionSet incident;
  DirectionSet observation;
  double noise_level = 0.0;

  FarFieldMatrix(CMatrix v, double k, DirectionSet inc, DirectionSet obs,
                 double delta = 0.0);
};

/// Total fields u(., d_q) on a grid, one per incident direction.
struct TotalFieldSet {
  Grid grid;
  double wave_number;
  std::vector<CMatrix> fields;
};

/// Frobenius inner product <a, b> = sum a_ij conj(b_ij).
inline Complex inner(const CMatrix& a, const CMatrix& b) {
  return (a.array() * b.array().conjugate()).sum();
}

/// max_ij |a_ij|
double max_modulus(const CMatrix& a);

/// 64-bit FNV-1a digest of the raw matrix bytes, used as a content key.
std::uint64_t content_hash(const CMatrix& a);
std::uint64_t content_hash(const RMatrix& a);

}  // namespace scatterkit
