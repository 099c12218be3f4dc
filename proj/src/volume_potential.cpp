#include "scatterkit/volume_potential.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include <boost/math/special_functions/hankel.hpp>
#include <fftw3.h>

#include "scatterkit/error.hpp"

namespace scatterkit {

namespace {

// The FFTW planner keeps global state; plan creation and destruction must be
// serialized. Execution with the new-array interface is reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {
    if (data == nullptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
};

// mean of ln|x| over the unit square centered at the origin
constexpr double kMeanLogUnitSquare = std::numbers::pi / 4.0 - 1.5 - std::numbers::ln2 / 2.0;

Complex self_cell_weight(double k, double h) {
  using std::numbers::pi;
  const double a = h / std::sqrt(pi);
  const Complex i(0.0, 1.0);
  // int over |x| < a of (i/4) H0(k|x|) dx
  const Complex disk = i * pi * a * boost::math::cyl_hankel_1(1, k * a) / (2.0 * k) - 1.0 / (k * k);
  // leading singular part of Phi is -ln(r)/(2 pi); swap its disk average for the square's
  const double correction =
      -(h * h) / (2.0 * pi) * ((std::log(h) + kMeanLogUnitSquare) - (std::log(a) - 0.5));
  return disk + correction;
}

// Per-thread scratch space for apply(); grows to the largest grid seen.
fftw_complex* workspace(std::size_t n) {
  thread_local std::unique_ptr<FftwBuffer> buf;
  thread_local std::size_t size = 0;
  if (size < n) {
    buf.reset();
    buf = std::make_unique<FftwBuffer>(n);
    size = n;
  }
  return buf->data;
}

void check_finite(const CMatrix& w) {
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      if (!std::isfinite(w(r, c).real()) || !std::isfinite(w(r, c).imag())) {
        throw NumericalError("volume potential input has a non-finite entry at (" +
                             std::to_string(r) + ", " + std::to_string(c) + ")");
      }
    }
  }
}

}  // namespace

Complex helmholtz_green(double k, double r) {
  return Complex(0.0, 0.25) * boost::math::cyl_hankel_1(0, k * r);
}

struct VolumePotential::Plan {
  int n = 0;
  int m = 0;
  std::vector<Complex> kernel_hat;  // FFT of the embedded kernel, scaled by 1/m^2
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Plan() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

VolumePotential::VolumePotential(const Grid& grid, double k) : grid_(grid), k_(k) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw ConfigError("wave number must be positive, got " + std::to_string(k));
  }
  const double h = grid.spacing();
  self_weight_ = self_cell_weight(k, h);

  auto plan = std::make_shared<Plan>();
  const int n = grid.n();
  const int m = 2 * n;
  plan->n = n;
  plan->m = m;
  const auto total = static_cast<std::size_t>(m) * m;

  FftwBuffer buf(total);
  {
    std::lock_guard lock(planner_mutex());
    plan->forward = fftw_plan_dft_2d(m, m, buf.data, buf.data, FFTW_FORWARD, FFTW_ESTIMATE);
    plan->backward = fftw_plan_dft_2d(m, m, buf.data, buf.data, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (plan->forward == nullptr || plan->backward == nullptr) {
    throw Error("FFTW failed to create a " + std::to_string(m) + "x" + std::to_string(m) + " plan");
  }

  // Offsets -(n-1)..(n-1) wrap onto distinct indices of the 2n-periodic grid;
  // index n is never reached by a pair of pixels inside C_rho.
  auto* data = reinterpret_cast<Complex*>(buf.data);
  for (int a = 0; a < m; ++a) {
    const int di = a < n ? a : a - m;
    for (int b = 0; b < m; ++b) {
      const int dj = b < n ? b : b - m;
      data[static_cast<std::size_t>(a) * m + b] =
          (a == n || b == n) ? Complex(0.0) : weight(di, dj);
    }
  }
  fftw_execute_dft(plan->forward, buf.data, buf.data);
  plan->kernel_hat.assign(data, data + total);
  const double scale = 1.0 / static_cast<double>(total);
  for (auto& v : plan->kernel_hat) v *= scale;
  plan_ = std::move(plan);
}

Complex VolumePotential::weight(int di, int dj) const {
  if (di == 0 && dj == 0) return self_weight_;
  const double h = grid_.spacing();
  const double r = h * std::hypot(static_cast<double>(di), static_cast<double>(dj));
  return helmholtz_green(k_, r) * (h * h);
}

CMatrix VolumePotential::apply(const CMatrix& w) const {
  const int n = plan_->n;
  const int m = plan_->m;
  if (w.rows() != n || w.cols() != n) {
    throw ConfigError("volume potential expects a " + std::to_string(n) + "x" +
                      std::to_string(n) + " input");
  }
  check_finite(w);

  const auto total = static_cast<std::size_t>(m) * m;
  fftw_complex* raw = workspace(total);
  auto* data = reinterpret_cast<Complex*>(raw);
  std::fill(data, data + total, Complex(0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) data[static_cast<std::size_t>(i) * m + j] = w(i, j);
  }
  fftw_execute_dft(plan_->forward, raw, raw);
  const Complex* kh = plan_->kernel_hat.data();
  for (std::size_t t = 0; t < total; ++t) {
    // plain product; inputs are finite so the C99 Annex G special cases never apply
    const double re = data[t].real() * kh[t].real() - data[t].imag() * kh[t].imag();
    const double im = data[t].real() * kh[t].imag() + data[t].imag() * kh[t].real();
    data[t] = Complex(re, im);
  }
  fftw_execute_dft(plan_->backward, raw, raw);

  CMatrix out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out(i, j) = data[static_cast<std::size_t>(i) * m + j];
  }
  return out;
}

CMatrix VolumePotential::apply_adjoint(const CMatrix& w) const {
  return apply(w.conjugate()).conjugate();
}

CMatrix apply_kernel(const Grid& grid, double k, const CMatrix& w) {
  return VolumePotential(grid, k).apply(w);
}

}  // namespace scatterkit
