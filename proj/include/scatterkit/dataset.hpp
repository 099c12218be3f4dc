#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "json.hpp"
#include "scatterkit/forward.hpp"
#include "scatterkit/grid.hpp"

namespace scatterkit {

struct Ellipse {
  Point center;
  double a;      ///< semi-major axis
  double b;      ///< semi-minor axis
  double theta;  ///< rotation angle
  double value;  ///< contrast inside

  /// (x/a)^2 + (y/b)^2 <= 1 after undoing the rotation and translation.
  bool contains(const Point& p) const;
  /// Euclidean distance from p to the filled ellipse (0 inside).
  double distance(const Point& p) const;
  Point boundary_point(double t) const;
};

struct EllipseScene {
  std::vector<Ellipse> ellipses;
};

struct SceneLimits {
  double rho = 3.0;
  double margin = 0.1;  ///< minimum gap between ellipses
  int max_attempts = 10000;
};

/// Two or three disjoint ellipses: a ~ U(0.6, 1.2), b ~ U(0.3, 0.6) with a > b,
/// theta ~ U(0, 2 pi), value ~ U(1, 3), center uniform over B_{rho - a}.
/// Whole scenes are redrawn until every ellipse lies in B_rho and all pairs are
/// separated by at least `margin`.
EllipseScene sample_scene(std::uint64_t seed, const SceneLimits& limits = {});

/// Lower bound on the gap between two ellipses (0 when they touch or overlap).
double ellipse_gap(const Ellipse& e, const Ellipse& f);

/// Pixel value = value of the ellipse containing the pixel center, else 0.
ContrastField rasterize(const EllipseScene& scene, const Grid& grid);

/// m * (target / max|m|).
ContrastField scale_to_max(const ContrastField& m, double target);

nlohmann::json scene_to_json(const EllipseScene& scene);

struct DatasetConfig {
  int count = 300;
  std::uint64_t seed = 1;
  double delta = 0.05;
  double rho = 3.0;
  int n_forward = 320;
  int n_inversion = 80;
  double k = 1.0;
  double k0 = 15.0;
  int p1 = 32, q1 = 16;   ///< inversion data directions
  int p2 = 128, q2 = 64;  ///< imaging data directions
  double train_fraction = 0.9;
  bool write_inversion_data = true;
  SolverOptions solver{};
};

/// Per-sample seed streams derived from the dataset seed.
struct SampleSeeds {
  std::uint64_t scene;
  std::uint64_t noise_k;
  std::uint64_t noise_k0;
};
SampleSeeds sample_seeds(std::uint64_t dataset_seed, int index);

/// Writes pairs/, truth/, farfield/ and manifest.json under `out_dir`.
/// Samples whose files already exist are skipped (their digests are
/// recomputed for the manifest). Returns the manifest.
nlohmann::json generate_training_set(const DatasetConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace scatterkit
