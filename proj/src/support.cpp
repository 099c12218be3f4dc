#include "scatterkit/support.hpp"

#include <string>

#include "scatterkit/error.hpp"

namespace scatterkit {

namespace {

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ConfigError("threshold gamma must lie in (0, 1), got " + std::to_string(gamma));
  }
}

}  // namespace

SupportMask::SupportMask(Grid g, RMatrix v) : grid(g), values(std::move(v)) {
  if (values.rows() != grid.n() || values.cols() != grid.n()) {
    throw ConfigError("mask shape does not match its grid");
  }
  if (!is_binary()) throw ConfigError("support mask entries must be 0 or 1");
}

SupportMask SupportMask::ones(const Grid& g) { return {g, RMatrix::Ones(g.n(), g.n())}; }

SupportMask SupportMask::zeros(const Grid& g) { return {g, RMatrix::Zero(g.n(), g.n())}; }

Eigen::Index SupportMask::count() const {
  return static_cast<Eigen::Index>(values.sum());
}

bool SupportMask::is_binary() const {
  return ((values.array() == 0.0) || (values.array() == 1.0)).all();
}

SupportMask support_of(const ContrastField& m) {
  const RMatrix v = (m.values.array() != Complex(0.0, 0.0)).cast<double>();
  return {m.grid, v};
}

SupportMask threshold(const Grid& grid, const RMatrix& a, double gamma) {
  check_gamma(gamma);
  if (a.rows() != grid.n() || a.cols() != grid.n()) {
    throw ConfigError("threshold input shape does not match the grid");
  }
  const RMatrix v = (a.array() > gamma).cast<double>();
  return {grid, v};
}

SupportMask extract_support(const SupportExtractor& extractor, const ImagingMatrix& image) {
  struct Visitor {
    const ImagingMatrix& image;
    SupportMask operator()(const ClassicalExtractor& e) const {
      return threshold(image.grid, normalize(image.values), e.gamma);
    }
    SupportMask operator()(const NeuralExtractor& e) const {
      check_gamma(e.gamma);
      if (!e.weights) throw ConfigError("neural extractor has no weights loaded");
      if (image.grid.n() != kUnetInputSize) {
        throw ConfigError("neural support extraction needs an 80x80 imaging grid, got " +
                          std::to_string(image.grid.n()));
      }
      return threshold(image.grid, unet_infer(*e.weights, normalize(image.values)), e.gamma);
    }
    SupportMask operator()(const OracleExtractor& e) const { return e.mask; }
  };
  return std::visit(Visitor{image}, extractor);
}

double intersection_over_union(const SupportMask& a, const SupportMask& b) {
  const double inter = a.values.cwiseProduct(b.values).sum();
  const double uni = (a.values + b.values - a.values.cwiseProduct(b.values)).sum();
  return uni == 0.0 ? 1.0 : inter / uni;
}

}  // namespace scatterkit
