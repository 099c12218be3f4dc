#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "scatterkit/dataset.hpp"
#include "scatterkit/inversion.hpp"

namespace scatterkit::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kNumericalError = 3,
  kIoError = 4,
};

struct PhantomArgs {
  std::string kind = "scene";  // scene | disk
  double rho = 3.0;
  int n = 80;
  std::uint64_t seed = 1;
  double scale = 0.0;  // rescale to this max|m|; 0 keeps the raw values
  double n0 = 2.0;
  double radius = 1.0;
  fs::path out;
};

struct SimulateArgs {
  fs::path truth;
  double k = 1.0;
  int p = 32;
  int q = 16;
  double delta = 0.05;
  std::uint64_t seed = 0;
  double tolerance = 1e-8;
  int jobs = 0;
  fs::path out;
};

struct ImageArgs {
  fs::path farfield;
  double rho = 3.0;
  int n = 80;
  fs::path out;
};

struct ExtractArgs {
  fs::path imaging;
  std::string extractor = "classical";  // classical | neural | oracle
  double gamma = -1.0;                  // < 0 selects the extractor's default
  fs::path weights;
  fs::path oracle;
  fs::path out;
};

struct ReconstructArgs {
  fs::path farfield;
  fs::path mask;
  std::string algorithm = "projected";  // landweber | projected | variational
  ReconstructionConfig config{};
  bool k_given = false;  // otherwise k is taken from the data file
  double rho = 3.0;  // grid used by landweber when no mask is given
  int n = 80;
  fs::path truth;
  fs::path out;
};

struct EvalArgs {
  fs::path reconstruction;
  fs::path truth;
  fs::path report;  // optional CSV, one row appended per call
};

struct ExportArgs {
  fs::path in;
  fs::path out;
  std::string part = "abs";  // abs | real | imag for complex inputs
};

void cmd_phantom(const PhantomArgs& a);
void cmd_gen_data(const DatasetConfig& cfg, const fs::path& out);
void cmd_simulate(const SimulateArgs& a);
void cmd_image(const ImageArgs& a);
void cmd_extract(const ExtractArgs& a);
void cmd_reconstruct(const ReconstructArgs& a);
/// Returns E and prints one report row.
double cmd_eval(const EvalArgs& a);
void cmd_export(const ExportArgs& a);

/// Parses argv-style arguments (without the program name), runs the selected
/// subcommand and maps failures to exit codes.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace scatterkit::cli
