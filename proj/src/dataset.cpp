#include "scatterkit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "scatterkit/error.hpp"
#include "scatterkit/imaging.hpp"
#include "scatterkit/io.hpp"
#include "scatterkit/rng.hpp"
#include "scatterkit/support.hpp"

namespace scatterkit {

namespace {

using std::numbers::pi;

Point to_local(const Ellipse& e, const Point& p) {
  const Point d = p - e.center;
  const double c = std::cos(e.theta);
  const double s = std::sin(e.theta);
  return {c * d.x() + s * d.y(), -s * d.x() + c * d.y()};
}

// Distance from (y0, y1), both >= 0, to the boundary of the axis-aligned
// ellipse with semi-axes e0 >= e1 > 0 (robust bisection on the Lagrange
// multiplier of the closest-point problem).
double distance_to_boundary(double e0, double e1, double y0, double y1) {
  if (y1 > 0.0) {
    if (y0 > 0.0) {
      const double z0 = y0 / e0;
      const double z1 = y1 / e1;
      const double g = z0 * z0 + z1 * z1 - 1.0;
      if (g == 0.0) return 0.0;
      const double r0 = (e0 / e1) * (e0 / e1);
      const double n0 = r0 * z0;
      double s0 = z1 - 1.0;
      double s1 = g < 0.0 ? 0.0 : std::hypot(n0, z1) - 1.0;
      double s = 0.0;
      for (int it = 0; it < 200; ++it) {
        s = 0.5 * (s0 + s1);
        if (s == s0 || s == s1) break;
        const double ratio0 = n0 / (s + r0);
        const double ratio1 = z1 / (s + 1.0);
        const double gs = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
        if (gs > 0.0) {
          s0 = s;
        } else if (gs < 0.0) {
          s1 = s;
        } else {
          break;
        }
      }
      const double x0 = r0 * y0 / (s + r0);
      const double x1 = y1 / (s + 1.0);
      return std::hypot(x0 - y0, x1 - y1);
    }
    return std::abs(y1 - e1);
  }
  const double numer0 = e0 * y0;
  const double denom0 = e0 * e0 - e1 * e1;
  if (numer0 < denom0) {
    const double xde0 = numer0 / denom0;
    const double x0 = e0 * xde0;
    const double x1 = e1 * std::sqrt(1.0 - xde0 * xde0);
    return std::hypot(x0 - y0, x1);
  }
  return std::abs(y0 - e0);
}

bool scene_is_valid(const EllipseScene& scene, const SceneLimits& limits) {
  for (const auto& e : scene.ellipses) {
    if (!(e.a > e.b)) return false;
    if (e.center.norm() + e.a >= limits.rho) return false;
  }
  for (std::size_t i = 0; i < scene.ellipses.size(); ++i) {
    for (std::size_t j = i + 1; j < scene.ellipses.size(); ++j) {
      if (ellipse_gap(scene.ellipses[i], scene.ellipses[j]) < limits.margin) return false;
    }
  }
  return true;
}

std::string index_name(int index) {
  std::ostringstream s;
  s << std::setw(5) << std::setfill('0') << index;
  return s.str();
}

}  // namespace

bool Ellipse::contains(const Point& p) const {
  const Point l = to_local(*this, p);
  const double u = l.x() / a;
  const double v = l.y() / b;
  return u * u + v * v <= 1.0;
}

double Ellipse::distance(const Point& p) const {
  if (contains(p)) return 0.0;
  const Point l = to_local(*this, p);
  return distance_to_boundary(a, b, std::abs(l.x()), std::abs(l.y()));
}

Point Ellipse::boundary_point(double t) const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double x = a * std::cos(t);
  const double y = b * std::sin(t);
  return center + Point(c * x - s * y, s * x + c * y);
}

double ellipse_gap(const Ellipse& e, const Ellipse& f) {
  if (e.contains(f.center) || f.contains(e.center)) return 0.0;
  // Sample each boundary; the gap is 1-Lipschitz along the curve, so the
  // sampled minimum overestimates it by at most half the arc spacing.
  constexpr int samples = 512;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [src_ptr, dst_ptr] : {std::pair{&e, &f}, std::pair{&f, &e}}) {
    const Ellipse& src = *src_ptr;
    const Ellipse& dst = *dst_ptr;
    const double spacing = 2.0 * pi * src.a / samples;  // bounds the arc step
    for (int s = 0; s < samples; ++s) {
      const double d = dst.distance(src.boundary_point(2.0 * pi * s / samples)) - 0.5 * spacing;
      best = std::min(best, d);
    }
  }
  return std::max(best, 0.0);
}

EllipseScene sample_scene(std::uint64_t seed, const SceneLimits& limits) {
  Rng rng(seed);
  for (int attempt = 0; attempt < limits.max_attempts; ++attempt) {
    EllipseScene scene;
    const auto count = rng.uniform_int(2, 3);
    for (std::int64_t e = 0; e < count; ++e) {
      Ellipse el{};
      el.a = rng.uniform(0.6, 1.2);
      el.b = rng.uniform(0.3, 0.6);
      el.theta = rng.uniform(0.0, 2.0 * pi);
      el.value = rng.uniform(1.0, 3.0);
      const double r = (limits.rho - el.a) * std::sqrt(rng.uniform());
      const double phi = rng.uniform(0.0, 2.0 * pi);
      el.center = Point(r * std::cos(phi), r * std::sin(phi));
      scene.ellipses.push_back(el);
    }
    if (scene_is_valid(scene, limits)) return scene;
  }
  throw NumericalError("ellipse scene sampling exhausted " + std::to_string(limits.max_attempts) +
                       " attempts for seed " + std::to_string(seed));
}

ContrastField rasterize(const EllipseScene& scene, const Grid& grid) {
  CMatrix v = CMatrix::Zero(grid.n(), grid.n());
  for (int j = 0; j < grid.n(); ++j) {
    for (int i = 0; i < grid.n(); ++i) {
      const Point x = grid.center(i, j);
      for (const auto& e : scene.ellipses) {
        if (e.contains(x)) {
          v(i, j) = e.value;
          break;
        }
      }
    }
  }
  return ContrastField(grid, std::move(v));
}

ContrastField scale_to_max(const ContrastField& m, double target) {
  if (!(target > 0.0)) throw ConfigError("scale target must be positive");
  const double peak = max_modulus(m.values);
  if (peak == 0.0) throw ConfigError("cannot rescale a zero contrast");
  return ContrastField(m.grid, m.values * (target / peak));
}

nlohmann::json scene_to_json(const EllipseScene& scene) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : scene.ellipses) {
    out.push_back({{"x0", e.center.x()}, {"y0", e.center.y()}, {"a", e.a}, {"b", e.b},
                   {"theta", e.theta}, {"c", e.value}});
  }
  return out;
}

SampleSeeds sample_seeds(std::uint64_t dataset_seed, int index) {
  const auto base = static_cast<std::uint64_t>(index) * 3;
  return {derive_seed(dataset_seed, base), derive_seed(dataset_seed, base + 1),
          derive_seed(dataset_seed, base + 2)};
}

nlohmann::json generate_training_set(const DatasetConfig& cfg, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  if (cfg.count < 1) throw ConfigError("dataset count must be positive");
  if (!(cfg.train_fraction >= 0.0 && cfg.train_fraction <= 1.0)) {
    throw ConfigError("train fraction must lie in [0, 1]");
  }
  const Grid fwd(cfg.rho, cfg.n_forward);
  const Grid inv(cfg.rho, cfg.n_inversion);
  const DirectionSet inc1(cfg.q1), obs1(cfg.p1), inc2(cfg.q2), obs2(cfg.p2);
  fs::create_directories(out_dir / "pairs");
  fs::create_directories(out_dir / "truth");
  fs::create_directories(out_dir / "farfield");

  nlohmann::json samples = nlohmann::json::array();
  for (int index = 0; index < cfg.count; ++index) {
    const std::string name = index_name(index);
    const SampleSeeds seeds = sample_seeds(cfg.seed, index);
    const fs::path input = out_dir / "pairs" / (name + ".input.real1");
    const fs::path target = out_dir / "pairs" / (name + ".target.real1");
    const fs::path truth = out_dir / "truth" / (name + ".cplx1");
    const fs::path ff_k = out_dir / "farfield" / (name + ".k.cplx1");
    const fs::path ff_k0 = out_dir / "farfield" / (name + ".k0.cplx1");
    std::vector<fs::path> files = {input, target, truth, ff_k0};
    if (cfg.write_inversion_data) files.push_back(ff_k);

    const EllipseScene scene = sample_scene(seeds.scene, SceneLimits{cfg.rho});
    const bool done = std::all_of(files.begin(), files.end(), [](const fs::path& p) {
      return fs::exists(p) && fs::exists(io::sidecar_path(p));
    });
    if (!done) {
      try {
        const ContrastField fine = rasterize(scene, fwd);
        const ContrastField coarse = rasterize(scene, inv);
        const FarFieldMatrix u0 = add_noise(
            far_field_operator(fine, cfg.k0, inc2, obs2, cfg.solver), cfg.delta, seeds.noise_k0);
        const ImagingMatrix image = imaging_matrix(u0, inv);
        io::save_far_field(ff_k0, u0, seeds.noise_k0);
        io::write_real1(input, normalize(image.values));
        io::write_sidecar(input, {{"kind", "network-input"}, {"rho", cfg.rho}, {"n", cfg.n_inversion},
                                  {"k0", cfg.k0}, {"P", cfg.p2}, {"Q", cfg.q2}, {"delta", cfg.delta}});
        io::save_mask(target, support_of(coarse));
        io::save_contrast(truth, coarse, {{"scene", scene_to_json(scene)}});
        if (cfg.write_inversion_data) {
          const FarFieldMatrix u = add_noise(
              far_field_operator(fine, cfg.k, inc1, obs1, cfg.solver), cfg.delta, seeds.noise_k);
          io::save_far_field(ff_k, u, seeds.noise_k);
        }
      } catch (const NumericalError& e) {
        throw NumericalError("sample " + std::to_string(index) + ": " + e.what(), e.residual());
      }
    }
    nlohmann::json entry{{"index", index},
                         {"scene_seed", seeds.scene},
                         {"noise_seed_k", seeds.noise_k},
                         {"noise_seed_k0", seeds.noise_k0},
                         {"scene", scene_to_json(scene)},
                         {"files", nlohmann::json::object()}};
    for (const auto& f : files) {
      entry["files"][fs::relative(f, out_dir).generic_string()] = io::file_digest(f);
    }
    samples.push_back(std::move(entry));
  }

  const int train = static_cast<int>(std::lround(cfg.train_fraction * cfg.count));
  nlohmann::json split{{"train", nlohmann::json::array()}, {"val", nlohmann::json::array()}};
  for (int i = 0; i < cfg.count; ++i) split[i < train ? "train" : "val"].push_back(i);

  nlohmann::json manifest{
      {"format", "scatterkit-dataset-1"},
      {"count", cfg.count},
      {"seed", cfg.seed},
      {"delta", cfg.delta},
      {"rho", cfg.rho},
      {"grids", {{"forward", cfg.n_forward}, {"inversion", cfg.n_inversion}}},
      {"k", cfg.k},
      {"k0", cfg.k0},
      {"directions", {{"P1", cfg.p1}, {"Q1", cfg.q1}, {"P2", cfg.p2}, {"Q2", cfg.q2}}},
      {"solver_tolerance", cfg.solver.krylov.tolerance},
      {"split", split},
      {"samples", samples}};
  io::write_text_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

}  // namespace scatterkit
