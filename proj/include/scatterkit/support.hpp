#pragma once

#include <memory>
#include <variant>

#include "scatterkit/grid.hpp"
#include "scatterkit/imaging.hpp"
#include "scatterkit/unet.hpp"

namespace scatterkit {

/// Binary pixel mask; entries are exactly 0.0 or 1.0.
struct SupportMask {
  Grid grid;
  RMatrix values;

  SupportMask(Grid g, RMatrix v);
  static SupportMask ones(const Grid& g);
  static SupportMask zeros(const Grid& g);

  Eigen::Index count() const;
  bool is_binary() const;
};

/// 1 where m_ij != 0 (exact test), else 0.
SupportMask support_of(const ContrastField& m);

/// 1 where a_ij > gamma, 0 where a_ij <= gamma.
SupportMask threshold(const Grid& grid, const RMatrix& a, double gamma);

struct ClassicalExtractor {
  double gamma = 0.5;
};

struct NeuralExtractor {
  std::shared_ptr<const NetworkWeights> weights;
  double gamma = 0.1;
};

struct OracleExtractor {
  SupportMask mask;
};

using SupportExtractor = std::variant<ClassicalExtractor, NeuralExtractor, OracleExtractor>;

/// classical: threshold(normalize(I), gamma)
/// neural:    threshold(unet_infer(w, normalize(I)), gamma), 80x80 grids only
/// oracle:    the stored mask
SupportMask extract_support(const SupportExtractor& extractor, const ImagingMatrix& image);

/// |A & B| / |A | B|; 1 when both masks are empty.
double intersection_over_union(const SupportMask& a, const SupportMask& b);

}  // namespace scatterkit
