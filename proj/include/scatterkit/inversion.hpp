#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "scatterkit/derivative.hpp"
#include "scatterkit/support.hpp"

namespace scatterkit {

struct ReconstructionConfig {
  double k = 1.0;        ///< wave number of the inversion data
  double k0 = 15.0;      ///< wave number of the imaging data
  double mu = 1.0;       ///< stepsize
  double lambda = 1.0;   ///< weight of the support penalty (variational)
  double gamma = 0.1;    ///< mask threshold
  int iters_projected = 100;
  int iters_variational = 100;
  double solver_tolerance = 1e-8;
  std::uint64_t seed = 0;
  int jobs = 0;
  double divergence_limit = 1e3;  ///< abort once max|m_i| exceeds this

  void validate() const;
};

/// Row i describes outer step i: the data residual and penalty at m_i and,
/// when a truth is supplied, the relative error of the updated m_{i+1}.
struct IterateTrace {
  std::vector<double> residual;
  std::vector<double> regularization;
  std::vector<double> relative_error;

  std::size_t size() const { return residual.size(); }
};

struct Reconstruction {
  ContrastField contrast;
  IterateTrace trace;
};

struct InversionHooks {
  const ContrastField* truth = nullptr;
  /// Called with (i, m_i) after every update, i = 1..N.
  std::function<void(int, const CMatrix&)> observer;
};

/// mask (.) f
CMatrix project(const SupportMask& mask, const CMatrix& f);

/// 1/2 ||f - mask (.) f||^2
double support_penalty(const SupportMask& mask, const CMatrix& f);

/// m_{i+1} = S (.) (m_i - mu F'(m_i)^* (F(m_i) - u)), m_0 = 0, N_p steps.
Reconstruction projected_landweber(const FarFieldMatrix& data, const SupportMask& mask,
                                   const ReconstructionConfig& cfg, const InversionHooks& hooks = {});

/// Unprojected Landweber on `grid`, N_p steps.
Reconstruction landweber(const FarFieldMatrix& data, const Grid& grid,
                         const ReconstructionConfig& cfg, const InversionHooks& hooks = {});

/// Gradient descent on 1/2||F(m) - u||^2 + lambda/2 ||m - S (.) m||^2, N_v steps.
Reconstruction variational_gd(const FarFieldMatrix& data, const SupportMask& mask,
                              const ReconstructionConfig& cfg, const InversionHooks& hooks = {});

/// sqrt(mean |(n - n_hat)/n|^2) for refractive-index matrices.
double relative_error(const CMatrix& n_true, const CMatrix& n_hat);

/// relative_error(m_true + 1, m_hat + 1).
double relative_error_of_contrast(const CMatrix& m_true, const CMatrix& m_hat);

}  // namespace scatterkit
