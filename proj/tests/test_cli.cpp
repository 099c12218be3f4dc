#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "commands.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "scatterkit/imaging.hpp"
#include "scatterkit/io.hpp"
#include "scatterkit/support.hpp"

using namespace scatterkit;
namespace fs = std::filesystem;
using cli::run;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("scatterkit_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

std::vector<std::uint16_t> pgm_levels(const fs::path& p, int& width, int& height) {
  std::ifstream in(p, std::ios::binary);
  std::string magic;
  int maxval = 0;
  in >> magic >> width >> height >> maxval;
  in.get();
  REQUIRE(magic == "P5");
  REQUIRE(maxval == 65535);
  std::vector<std::uint16_t> out(static_cast<std::size_t>(width) * height);
  for (auto& v : out) {
    const int hi = in.get(), lo = in.get();
    v = static_cast<std::uint16_t>((hi << 8) | lo);
  }
  REQUIRE(in.good());
  return out;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("exit codes") {
  TempDir d("exit");
  CHECK(run({"--help"}) == 0);
  CHECK(run({}) == cli::kConfigError);
  CHECK(run({"simulate", "--bogus"}) == cli::kConfigError);
  CHECK(run({"simulate", "--truth", d / "missing.cplx1", "--out", d / "u.cplx1"}) == cli::kIoError);
  CHECK(run({"phantom", "--kind", "star", "--out", d / "m.cplx1"}) == cli::kConfigError);

  REQUIRE(run({"phantom", "--n", "24", "--seed", "3", "--scale", "3", "--out", d / "m.cplx1"}) == 0);
  REQUIRE(run({"simulate", "--truth", d / "m.cplx1", "--P", "8", "--Q", "4", "--out", d / "u.cplx1"}) == 0);
  CHECK(run({"reconstruct", "--farfield", d / "u.cplx1", "--algorithm", "projected", "--out", d / "r.cplx1"}) ==
        cli::kConfigError);
  CHECK(run({"reconstruct", "--farfield", d / "u.cplx1", "--algorithm", "newton", "--out", d / "r.cplx1"}) ==
        cli::kConfigError);
  // a huge stepsize diverges within a few iterations
  CHECK(run({"reconstruct", "--farfield", d / "u.cplx1", "--algorithm", "landweber", "--n", "24", "--mu",
             "1e6", "--iters-projected", "5", "--out", d / "r.cplx1"}) == cli::kNumericalError);
  CHECK(run({"simulate", "--truth", d / "m.cplx1", "--tol", "1e-18", "--P", "8", "--Q", "4", "--k", "15",
             "--out", d / "u2.cplx1"}) == cli::kNumericalError);
  {
    std::ofstream(d / "garbage.cplx1") << "not a matrix";
  }
  CHECK(run({"export", "--in", d / "garbage.cplx1", "--out", d / "g.csv"}) == cli::kIoError);
  CHECK(run({"export", "--in", d / "m.cplx1", "--out", d / "g.txt"}) == cli::kConfigError);
}

TEST_CASE("PGM export of a zero matrix is uniform and a mask has two gray levels") {
  TempDir d("pgm");
  io::write_real1(d / "zero.real1", RMatrix::Zero(7, 5));
  REQUIRE(run({"export", "--in", d / "zero.real1", "--out", d / "zero.pgm"}) == 0);
  int w = 0, h = 0;
  const auto zero = pgm_levels(d / "zero.pgm", w, h);
  CHECK(w == 7);
  CHECK(h == 5);
  CHECK(std::set<std::uint16_t>(zero.begin(), zero.end()).size() == 1);

  const Grid g(3.0, 40);
  io::save_mask(d / "mask.real1", support_of(testutil::two_ellipses(g, 1.0)));
  REQUIRE(run({"export", "--in", d / "mask.real1", "--out", d / "mask.pgm"}) == 0);
  const auto mask = pgm_levels(d / "mask.pgm", w, h);
  CHECK(std::set<std::uint16_t>(mask.begin(), mask.end()) == std::set<std::uint16_t>{0, 65535});
  const auto side = io::read_sidecar(d / "mask.pgm");
  CHECK(side["min"] == 0.0);
  CHECK(side["max"] == 1.0);
  CHECK(fs::exists(d / "mask.pgm.manifest.json"));
}

TEST_CASE("CSV export parses back to 1e-15") {
  TempDir d("csv");
  const CMatrix c = testutil::random_matrix(9, 6, 4) * 1e3;
  io::write_cplx1(d / "c.cplx1", c);
  for (const char* part : {"abs", "real", "imag"}) {
    REQUIRE(run({"export", "--in", d / "c.cplx1", "--out", d / "c.csv", "--part", part}) == 0);
    const RMatrix back = io::read_csv(d / "c.csv");
    const RMatrix ref = std::string(part) == "abs" ? RMatrix(c.cwiseAbs())
                        : std::string(part) == "real" ? RMatrix(c.real()) : RMatrix(c.imag());
    CHECK((back - ref).cwiseAbs().maxCoeff() <= 1e-15 * ref.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("file pipeline equals the in-memory pipeline bit for bit") {
  TempDir d("pipeline");
  REQUIRE(run({"phantom", "--n", "24", "--seed", "5", "--scale", "2", "--out", d / "m.cplx1"}) == 0);
  REQUIRE(run({"simulate", "--truth", d / "m.cplx1", "--k", "5", "--P", "16", "--Q", "8", "--delta", "0.05",
               "--seed", "11", "--out", d / "u0.cplx1"}) == 0);
  REQUIRE(run({"simulate", "--truth", d / "m.cplx1", "--k", "1", "--P", "8", "--Q", "4", "--delta", "0.05",
               "--seed", "12", "--out", d / "u.cplx1"}) == 0);
  REQUIRE(run({"image", "--farfield", d / "u0.cplx1", "--n", "24", "--out", d / "img.real1"}) == 0);
  REQUIRE(run({"extract", "--imaging", d / "img.real1", "--gamma", "0.3", "--out", d / "mask.real1"}) == 0);
  REQUIRE(run({"reconstruct", "--farfield", d / "u.cplx1", "--mask", d / "mask.real1", "--iters-projected", "4",
               "--truth", d / "m.cplx1", "--out", d / "rec.cplx1"}) == 0);

  const Grid g(3.0, 24);
  const ContrastField m = scale_to_max(rasterize(sample_scene(5), g), 2.0);
  CHECK(io::load_contrast(d / "m.cplx1").values == m.values);
  const FarFieldMatrix u0 = add_noise(far_field_operator(m, 5.0, DirectionSet(8), DirectionSet(16)), 0.05, 11);
  const FarFieldMatrix u = add_noise(far_field_operator(m, 1.0, DirectionSet(4), DirectionSet(8)), 0.05, 12);
  CHECK(io::load_far_field(d / "u0.cplx1").values == u0.values);
  const ImagingMatrix img = imaging_matrix(u0, g);
  CHECK(io::load_imaging(d / "img.real1").values == img.values);
  const SupportMask mask = extract_support(ClassicalExtractor{0.3}, img);
  CHECK(io::load_mask(d / "mask.real1").values == mask.values);
  ReconstructionConfig cfg;
  cfg.iters_projected = 4;
  const Reconstruction rec = projected_landweber(u, mask, cfg);
  CHECK(io::load_contrast(d / "rec.cplx1").values == rec.contrast.values);

  const auto manifest = read_json(d / "rec.cplx1.manifest.json");
  CHECK(manifest["command"] == "reconstruct");
  CHECK(manifest["options"]["iters_projected"] == 4);
  CHECK(manifest["inputs"].size() == 3);
  CHECK(fs::exists(d / "rec.cplx1.trace.csv"));

  // eval reproduces the library error and appends a report row
  REQUIRE(run({"eval", "--reconstruction", d / "rec.cplx1", "--truth", d / "m.cplx1", "--report", d / "r.csv"}) == 0);
  REQUIRE(run({"eval", "--reconstruction", d / "rec.cplx1", "--truth", d / "m.cplx1", "--report", d / "r.csv"}) == 0);
  std::ifstream report(d / "r.csv");
  std::string header, row1, row2;
  std::getline(report, header);
  std::getline(report, row1);
  std::getline(report, row2);
  CHECK(header == "reconstruction,truth,E");
  CHECK(row1 == row2);
  const double e = std::stod(row1.substr(row1.rfind(',') + 1));
  CHECK(e == relative_error_of_contrast(m.values, rec.contrast.values));
}

TEST_CASE("config file values apply and command-line flags win") {
  TempDir d("config");
  REQUIRE(run({"phantom", "--n", "16", "--seed", "2", "--scale", "1", "--out", d / "m.cplx1"}) == 0);
  REQUIRE(run({"simulate", "--truth", d / "m.cplx1", "--P", "8", "--Q", "4", "--out", d / "u.cplx1"}) == 0);
  {
    std::ofstream cfg(d / "run.toml");
    cfg << "[reconstruct]\nmu = 0.5\nlambda = 0.25\niters-projected = 2\n";
  }
  REQUIRE(run({"--config", d / "run.toml", "reconstruct", "--farfield", d / "u.cplx1", "--algorithm", "landweber",
               "--n", "16", "--mu", "0.75", "--out", d / "r.cplx1"}) == 0);
  const auto options = read_json(d / "r.cplx1.manifest.json")["options"];
  CHECK(options["mu"] == 0.75);
  CHECK(options["lambda"] == 0.25);
  CHECK(options["iters_projected"] == 2);
  CHECK(options["k"] == 1.0);
}

TEST_CASE("simulating a zero contrast gives zero data") {
  TempDir d("zero");
  io::save_contrast(d / "z.cplx1", ContrastField::zero(Grid(3.0, 16)));
  REQUIRE(run({"simulate", "--truth", d / "z.cplx1", "--P", "8", "--Q", "4", "--delta", "0", "--out", d / "u.cplx1"}) == 0);
  CHECK(io::load_far_field(d / "u.cplx1").values.isZero(0.0));
}
