#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>

#include "json.hpp"
#include "scatterkit/grid.hpp"
#include "scatterkit/imaging.hpp"
#include "scatterkit/support.hpp"

namespace scatterkit::io {

namespace fs = std::filesystem;
using nlohmann::json;

// CPLX1: "CPLX1\0\0\0", u32 rows, u32 cols, row-major (re, im) float64 pairs.
// REAL1: "REAL1\0\0\0", u32 rows, u32 cols, row-major float64.
// All little-endian. Metadata lives in a JSON sidecar at "<path>.json".

void write_cplx1(const fs::path& path, const CMatrix& m);
CMatrix read_cplx1(const fs::path& path);
void write_real1(const fs::path& path, const RMatrix& m);
RMatrix read_real1(const fs::path& path);

/// Reads either format, dispatching on the magic bytes.
std::variant<CMatrix, RMatrix> read_matrix(const fs::path& path);

fs::path sidecar_path(const fs::path& path);
void write_sidecar(const fs::path& path, const json& meta);
json read_sidecar(const fs::path& path);

/// Writes `text` to `path` through a temporary file and a rename.
void write_text_atomic(const fs::path& path, const std::string& text);

void save_contrast(const fs::path& path, const ContrastField& m, const json& extra = json::object());
ContrastField load_contrast(const fs::path& path);

void save_far_field(const fs::path& path, const FarFieldMatrix& u, std::uint64_t seed);
FarFieldMatrix load_far_field(const fs::path& path);

void save_imaging(const fs::path& path, const ImagingMatrix& image, int p, int q, double delta);
ImagingMatrix load_imaging(const fs::path& path);

void save_mask(const fs::path& path, const SupportMask& mask);
SupportMask load_mask(const fs::path& path);

/// 16-bit binary PGM (P5) with min-max scaling; image rows run from the top
/// (largest y) down, columns along x. The sidecar records min and max.
void export_pgm(const fs::path& path, const RMatrix& m);
/// Plain CSV, one matrix row per line, 17 significant digits.
void export_csv(const fs::path& path, const RMatrix& m);
RMatrix read_csv(const fs::path& path);

/// Hex digest (FNV-1a 64) of a file's bytes.
std::string file_digest(const fs::path& path);

}  // namespace scatterkit::io
