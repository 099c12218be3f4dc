#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "scatterkit/disk_series.hpp"
#include "scatterkit/error.hpp"
#include "scatterkit/imaging.hpp"
#include "scatterkit/io.hpp"
#include "scatterkit/support.hpp"
#include "scatterkit/unet.hpp"

namespace scatterkit::cli {

namespace {

using nlohmann::json;

fs::path with_suffix(const fs::path& p, const std::string& suffix) { return fs::path(p.string() + suffix); }

void require_path(const fs::path& p, const char* what) {
  if (p.empty()) throw ConfigError(std::string("missing required path: ") + what);
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

json digests(const std::vector<fs::path>& files) {
  json out = json::object();
  for (const auto& f : files) out[f.string()] = io::file_digest(f);
  return out;
}

// <out>.manifest.json: enough to re-run the command and to check its inputs.
void write_manifest(const fs::path& out, const std::string& command, const json& options,
                    const std::vector<fs::path>& inputs, const std::vector<fs::path>& outputs) {
  const json m{{"command", command},
               {"options", options},
               {"inputs", digests(inputs)},
               {"outputs", digests(outputs)}};
  io::write_text_atomic(with_suffix(out, ".manifest.json"), m.dump(2) + "\n");
}

json config_json(const ReconstructionConfig& c) {
  return {{"k", c.k},
          {"k0", c.k0},
          {"mu", c.mu},
          {"lambda", c.lambda},
          {"gamma", c.gamma},
          {"iters_projected", c.iters_projected},
          {"iters_variational", c.iters_variational},
          {"solver_tolerance", c.solver_tolerance},
          {"seed", c.seed},
          {"divergence_limit", c.divergence_limit}};
}

void check_same_grid(const Grid& a, const Grid& b, const std::string& what) {
  if (!(a == b)) {
    throw ConfigError(what + ": grids differ (rho " + std::to_string(a.rho()) + ", n " +
                      std::to_string(a.n()) + " vs rho " + std::to_string(b.rho()) + ", n " +
                      std::to_string(b.n()) + ")");
  }
}

void write_trace_csv(const fs::path& path, const IterateTrace& t) {
  std::ostringstream s;
  s << std::setprecision(17) << "iteration,residual,regularization,relative_error\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    s << i << ',' << t.residual[i] << ',' << t.regularization[i] << ',';
    if (i < t.relative_error.size()) s << t.relative_error[i];
    s << '\n';
  }
  io::write_text_atomic(path, s.str());
}

}  // namespace

void cmd_phantom(const PhantomArgs& a) {
  require_path(a.out, "--out");
  const Grid grid(a.rho, a.n);
  json extra{{"phantom", a.kind}};
  ContrastField m = ContrastField::zero(grid);
  if (a.kind == "scene") {
    const EllipseScene scene = sample_scene(a.seed, SceneLimits{a.rho});
    m = rasterize(scene, grid);
    extra["seed"] = a.seed;
    extra["scene"] = scene_to_json(scene);
  } else if (a.kind == "disk") {
    m = disk_contrast(grid, a.n0, a.radius);
    extra["n0"] = a.n0;
    extra["radius"] = a.radius;
  } else {
    throw ConfigError("unknown phantom kind '" + a.kind + "' (scene, disk)");
  }
  if (a.scale > 0.0) {
    m = scale_to_max(m, a.scale);
    extra["scale"] = a.scale;
  }
  ensure_parent(a.out);
  io::save_contrast(a.out, m, extra);
  write_manifest(a.out, "phantom",
                 {{"kind", a.kind}, {"rho", a.rho}, {"n", a.n}, {"seed", a.seed}, {"scale", a.scale},
                  {"n0", a.n0}, {"radius", a.radius}},
                 {}, {a.out});
}

void cmd_gen_data(const DatasetConfig& cfg, const fs::path& out) {
  require_path(out, "--out");
  generate_training_set(cfg, out);
}

void cmd_simulate(const SimulateArgs& a) {
  require_path(a.truth, "--truth");
  require_path(a.out, "--out");
  const ContrastField m = io::load_contrast(a.truth);
  SolverOptions opts;
  opts.krylov.tolerance = a.tolerance;
  opts.jobs = a.jobs;
  const FarFieldMatrix clean = far_field_operator(m, a.k, DirectionSet(a.q), DirectionSet(a.p), opts);
  const FarFieldMatrix data = add_noise(clean, a.delta, a.seed);
  ensure_parent(a.out);
  io::save_far_field(a.out, data, a.seed);
  write_manifest(a.out, "simulate",
                 {{"k", a.k}, {"P", a.p}, {"Q", a.q}, {"delta", a.delta}, {"seed", a.seed},
                  {"tolerance", a.tolerance}},
                 {a.truth}, {a.out});
}

void cmd_image(const ImageArgs& a) {
  require_path(a.farfield, "--farfield");
  require_path(a.out, "--out");
  const FarFieldMatrix data = io::load_far_field(a.farfield);
  const ImagingMatrix image = imaging_matrix(data, Grid(a.rho, a.n));
  ensure_parent(a.out);
  io::save_imaging(a.out, image, data.observation.count(), data.incident.count(), data.noise_level);
  write_manifest(a.out, "image", {{"rho", a.rho}, {"n", a.n}}, {a.farfield}, {a.out});
}

void cmd_extract(const ExtractArgs& a) {
  require_path(a.imaging, "--imaging");
  require_path(a.out, "--out");
  const ImagingMatrix image = io::load_imaging(a.imaging);
  std::vector<fs::path> inputs{a.imaging};
  SupportExtractor extractor = ClassicalExtractor{};
  double gamma = 0.0;
  if (a.extractor == "classical") {
    ClassicalExtractor c;
    if (a.gamma >= 0.0) c.gamma = a.gamma;
    gamma = c.gamma;
    extractor = c;
  } else if (a.extractor == "neural") {
    require_path(a.weights, "--weights");
    auto weights = std::make_shared<NetworkWeights>(read_weights(a.weights));
    weights->validate();
    NeuralExtractor c{weights};
    if (a.gamma >= 0.0) c.gamma = a.gamma;
    gamma = c.gamma;
    extractor = c;
    inputs.push_back(a.weights);
  } else if (a.extractor == "oracle") {
    require_path(a.oracle, "--oracle");
    SupportMask mask = io::load_mask(a.oracle);
    check_same_grid(mask.grid, image.grid, "oracle mask vs imaging matrix");
    extractor = OracleExtractor{std::move(mask)};
    inputs.push_back(a.oracle);
  } else {
    throw ConfigError("unknown extractor '" + a.extractor + "' (classical, neural, oracle)");
  }
  const SupportMask mask = extract_support(extractor, image);
  ensure_parent(a.out);
  io::save_mask(a.out, mask);
  write_manifest(a.out, "extract", {{"extractor", a.extractor}, {"gamma", gamma}}, inputs, {a.out});
}

void cmd_reconstruct(const ReconstructArgs& a) {
  require_path(a.farfield, "--farfield");
  require_path(a.out, "--out");
  const FarFieldMatrix data = io::load_far_field(a.farfield);
  ReconstructionConfig cfg = a.config;
  if (!a.k_given) cfg.k = data.wave_number;
  std::vector<fs::path> inputs{a.farfield};

  std::unique_ptr<SupportMask> mask;
  if (!a.mask.empty()) {
    mask = std::make_unique<SupportMask>(io::load_mask(a.mask));
    inputs.push_back(a.mask);
  }
  const Grid grid = mask ? mask->grid : Grid(a.rho, a.n);

  std::unique_ptr<ContrastField> truth;
  InversionHooks hooks;
  if (!a.truth.empty()) {
    truth = std::make_unique<ContrastField>(io::load_contrast(a.truth));
    check_same_grid(truth->grid, grid, "truth vs reconstruction grid");
    hooks.truth = truth.get();
    inputs.push_back(a.truth);
  }

  Reconstruction result{ContrastField::zero(grid), {}};
  if (a.algorithm == "landweber") {
    result = landweber(data, grid, cfg, hooks);
  } else if (a.algorithm == "projected" || a.algorithm == "variational") {
    if (!mask) throw ConfigError("algorithm '" + a.algorithm + "' needs --mask");
    result = a.algorithm == "projected" ? projected_landweber(data, *mask, cfg, hooks)
                                        : variational_gd(data, *mask, cfg, hooks);
  } else {
    throw ConfigError("unknown algorithm '" + a.algorithm + "' (landweber, projected, variational)");
  }

  ensure_parent(a.out);
  io::save_contrast(a.out, result.contrast, {{"algorithm", a.algorithm}});
  const fs::path trace = with_suffix(a.out, ".trace.csv");
  write_trace_csv(trace, result.trace);
  json options = config_json(cfg);
  options["algorithm"] = a.algorithm;
  options["rho"] = grid.rho();
  options["n"] = grid.n();
  write_manifest(a.out, "reconstruct", options, inputs, {a.out, trace});
}

double cmd_eval(const EvalArgs& a) {
  require_path(a.reconstruction, "--reconstruction");
  require_path(a.truth, "--truth");
  const ContrastField recon = io::load_contrast(a.reconstruction);
  const ContrastField truth = io::load_contrast(a.truth);
  check_same_grid(truth.grid, recon.grid, "truth vs reconstruction");
  const double e = relative_error_of_contrast(truth.values, recon.values);
  std::ostringstream row;
  row << std::setprecision(17) << a.reconstruction.string() << ',' << a.truth.string() << ',' << e;
  std::cout << row.str() << '\n';
  if (!a.report.empty()) {
    const bool fresh = !fs::exists(a.report);
    ensure_parent(a.report);
    std::ofstream out(a.report, std::ios::app);
    if (!out) throw IoError("cannot open " + a.report.string());
    if (fresh) out << "reconstruction,truth,E\n";
    out << row.str() << '\n';
    if (!out) throw IoError("failed writing " + a.report.string());
  }
  return e;
}

void cmd_export(const ExportArgs& a) {
  require_path(a.in, "--in");
  require_path(a.out, "--out");
  const auto matrix = io::read_matrix(a.in);
  RMatrix values;
  if (const auto* c = std::get_if<CMatrix>(&matrix)) {
    if (a.part == "abs") {
      values = c->cwiseAbs();
    } else if (a.part == "real") {
      values = c->real();
    } else if (a.part == "imag") {
      values = c->imag();
    } else {
      throw ConfigError("unknown part '" + a.part + "' (abs, real, imag)");
    }
  } else {
    values = std::get<RMatrix>(matrix);
  }
  ensure_parent(a.out);
  const std::string ext = a.out.extension().string();
  if (ext == ".pgm") {
    io::export_pgm(a.out, values);
  } else if (ext == ".csv") {
    io::export_csv(a.out, values);
  } else {
    throw ConfigError("export target must end in .pgm or .csv, got '" + a.out.string() + "'");
  }
  write_manifest(a.out, "export", {{"part", a.part}}, {a.in}, {a.out});
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Inverse medium scattering toolkit", "scatterkit"};
  app.set_config("--config", "", "TOML key = value file; command-line flags take precedence");
  app.require_subcommand(1);
  int jobs = 0;
  app.add_option("--jobs", jobs, "worker cap (0: SCATTERKIT_JOBS, else all cores)");

  PhantomArgs phantom;
  auto* ph = app.add_subcommand("phantom", "write a contrast phantom");
  ph->add_option("--kind", phantom.kind, "scene or disk")->capture_default_str();
  ph->add_option("--rho", phantom.rho)->capture_default_str();
  ph->add_option("--n", phantom.n)->capture_default_str();
  ph->add_option("--seed", phantom.seed)->capture_default_str();
  ph->add_option("--scale", phantom.scale, "rescale to this max|m| (0 keeps raw values)")->capture_default_str();
  ph->add_option("--n0", phantom.n0, "disk refractive index")->capture_default_str();
  ph->add_option("--radius", phantom.radius, "disk radius")->capture_default_str();
  ph->add_option("--out", phantom.out)->required();

  DatasetConfig data;
  fs::path data_out;
  auto* gd = app.add_subcommand("gen-data", "generate the training set");
  gd->add_option("--out", data_out)->required();
  gd->add_option("--count", data.count)->capture_default_str();
  gd->add_option("--seed", data.seed)->capture_default_str();
  gd->add_option("--delta", data.delta)->capture_default_str();
  gd->add_option("--rho", data.rho)->capture_default_str();
  gd->add_option("--n-fwd", data.n_forward)->capture_default_str();
  gd->add_option("--n-inv", data.n_inversion)->capture_default_str();
  gd->add_option("--k", data.k)->capture_default_str();
  gd->add_option("--k0", data.k0)->capture_default_str();
  gd->add_option("--p1", data.p1)->capture_default_str();
  gd->add_option("--q1", data.q1)->capture_default_str();
  gd->add_option("--p2", data.p2)->capture_default_str();
  gd->add_option("--q2", data.q2)->capture_default_str();
  gd->add_option("--train-fraction", data.train_fraction)->capture_default_str();
  gd->add_option("--tol", data.solver.krylov.tolerance)->capture_default_str();
  bool no_k_data = false;
  gd->add_flag("--no-k-data", no_k_data, "skip the far fields at the inversion wave number");

  SimulateArgs sim;
  auto* sm = app.add_subcommand("simulate", "far-field data of a contrast");
  sm->add_option("--truth", sim.truth)->required();
  sm->add_option("--k", sim.k)->capture_default_str();
  sm->add_option("--P", sim.p, "observation directions")->capture_default_str();
  sm->add_option("--Q", sim.q, "incident directions")->capture_default_str();
  sm->add_option("--delta", sim.delta)->capture_default_str();
  sm->add_option("--seed", sim.seed)->capture_default_str();
  sm->add_option("--tol", sim.tolerance)->capture_default_str();
  sm->add_option("--out", sim.out)->required();

  ImageArgs img;
  auto* im = app.add_subcommand("image", "imaging matrix of far-field data");
  im->add_option("--farfield", img.farfield)->required();
  im->add_option("--rho", img.rho)->capture_default_str();
  im->add_option("--n", img.n)->capture_default_str();
  im->add_option("--out", img.out)->required();

  ExtractArgs ext;
  auto* ex = app.add_subcommand("extract", "support mask from an imaging matrix");
  ex->add_option("--imaging", ext.imaging)->required();
  ex->add_option("--extractor", ext.extractor, "classical, neural or oracle")->capture_default_str();
  ex->add_option("--gamma", ext.gamma, "threshold (default 0.5 classical, 0.1 neural)");
  ex->add_option("--weights", ext.weights, "UNETW1 file for the neural extractor");
  ex->add_option("--oracle", ext.oracle, "mask file for the oracle extractor");
  ex->add_option("--out", ext.out)->required();

  ReconstructArgs rec;
  auto* rc = app.add_subcommand("reconstruct", "iterative reconstruction");
  rc->add_option("--farfield", rec.farfield)->required();
  rc->add_option("--mask", rec.mask);
  rc->add_option("--algorithm", rec.algorithm, "landweber, projected or variational")->capture_default_str();
  auto* k_opt = rc->add_option("--k", rec.config.k, "must match the data (default: from the file)");
  rc->add_option("--mu", rec.config.mu)->capture_default_str();
  rc->add_option("--lambda", rec.config.lambda)->capture_default_str();
  rc->add_option("--iters-projected", rec.config.iters_projected)->capture_default_str();
  rc->add_option("--iters-variational", rec.config.iters_variational)->capture_default_str();
  rc->add_option("--tol", rec.config.solver_tolerance)->capture_default_str();
  rc->add_option("--seed", rec.config.seed)->capture_default_str();
  rc->add_option("--divergence-limit", rec.config.divergence_limit)->capture_default_str();
  rc->add_option("--rho", rec.rho, "grid for landweber without a mask")->capture_default_str();
  rc->add_option("--n", rec.n, "grid for landweber without a mask")->capture_default_str();
  rc->add_option("--truth", rec.truth, "adds the relative error to the trace");
  rc->add_option("--out", rec.out)->required();

  EvalArgs ev;
  auto* el = app.add_subcommand("eval", "relative error of a reconstruction");
  el->add_option("--reconstruction", ev.reconstruction)->required();
  el->add_option("--truth", ev.truth)->required();
  el->add_option("--report", ev.report, "CSV file to append the result to");

  ExportArgs xp;
  auto* xo = app.add_subcommand("export", "PGM or CSV rendering of a matrix file");
  xo->add_option("--in", xp.in)->required();
  xo->add_option("--out", xp.out, "target ending in .pgm or .csv")->required();
  xo->add_option("--part", xp.part, "abs, real or imag for complex input")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (ph->parsed()) {
      cmd_phantom(phantom);
    } else if (gd->parsed()) {
      data.solver.jobs = jobs;
      data.write_inversion_data = !no_k_data;
      cmd_gen_data(data, data_out);
    } else if (sm->parsed()) {
      sim.jobs = jobs;
      cmd_simulate(sim);
    } else if (im->parsed()) {
      cmd_image(img);
    } else if (ex->parsed()) {
      cmd_extract(ext);
    } else if (rc->parsed()) {
      rec.config.jobs = jobs;
      rec.k_given = k_opt->count() > 0;
      cmd_reconstruct(rec);
    } else if (el->parsed()) {
      cmd_eval(ev);
    } else if (xo->parsed()) {
      cmd_export(xp);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kOk;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace scatterkit::cli
