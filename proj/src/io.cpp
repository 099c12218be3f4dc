#include "scatterkit/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "binary_io.hpp"
#include "scatterkit/error.hpp"

namespace scatterkit::io {

namespace {

constexpr char kCplxMagic[8] = {'C', 'P', 'L', 'X', '1', '\0', '\0', '\0'};
constexpr char kRealMagic[8] = {'R', 'E', 'A', 'L', '1', '\0', '\0', '\0'};

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

void write_header(std::ostream& out, const char* magic, Eigen::Index rows, Eigen::Index cols) {
  out.write(magic, 8);
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(rows));
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(cols));
}

std::pair<std::uint32_t, std::uint32_t> read_shape(std::istream& in, const std::string& ctx) {
  const auto rows = detail::read_le<std::uint32_t>(in, ctx);
  const auto cols = detail::read_le<std::uint32_t>(in, ctx);
  if (static_cast<std::uint64_t>(rows) * cols > (std::uint64_t{1} << 30)) {
    throw IoError(ctx + ": implausible shape " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  return {rows, cols};
}

std::string read_magic(std::istream& in, const std::string& ctx) {
  char magic[8];
  in.read(magic, 8);
  if (!in) throw IoError(ctx + ": file shorter than its header");
  return std::string(magic, 8);
}

CMatrix read_cplx_body(std::istream& in, const std::string& ctx) {
  const auto [rows, cols] = read_shape(in, ctx);
  CMatrix m(rows, cols);
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < cols; ++c) {
      const double re = detail::read_le<double>(in, ctx);
      const double im = detail::read_le<double>(in, ctx);
      m(r, c) = Complex(re, im);
    }
  }
  return m;
}

RMatrix read_real_body(std::istream& in, const std::string& ctx) {
  const auto [rows, cols] = read_shape(in, ctx);
  RMatrix m(rows, cols);
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < cols; ++c) m(r, c) = detail::read_le<double>(in, ctx);
  }
  return m;
}

template <typename T>
T meta_value(const json& meta, const char* key, const fs::path& path) {
  if (!meta.contains(key)) {
    throw IoError(sidecar_path(path).string() + ": missing key '" + key + "'");
  }
  try {
    return meta.at(key).get<T>();
  } catch (const json::exception& e) {
    throw IoError(sidecar_path(path).string() + ": bad value for '" + key + "': " + e.what());
  }
}

Grid grid_from(const json& meta, const fs::path& path) {
  try {
    return Grid(meta_value<double>(meta, "rho", path), meta_value<int>(meta, "n", path));
  } catch (const ConfigError& e) {
    throw IoError(sidecar_path(path).string() + ": " + e.what());
  }
}

void check_shape(Eigen::Index rows, Eigen::Index cols, Eigen::Index er, Eigen::Index ec,
                 const fs::path& path) {
  if (rows != er || cols != ec) {
    throw IoError(path.string() + ": matrix is " + std::to_string(rows) + "x" + std::to_string(cols) +
                  " but its sidecar implies " + std::to_string(er) + "x" + std::to_string(ec));
  }
}

}  // namespace

void write_cplx1(const fs::path& path, const CMatrix& m) {
  auto out = open_out(path);
  write_header(out, kCplxMagic, m.rows(), m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      detail::write_le<double>(out, m(r, c).real());
      detail::write_le<double>(out, m(r, c).imag());
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

CMatrix read_cplx1(const fs::path& path) {
  auto in = open_in(path);
  const std::string ctx = path.string();
  if (read_magic(in, ctx) != std::string(kCplxMagic, 8)) throw IoError(ctx + ": not a CPLX1 file");
  return read_cplx_body(in, ctx);
}

void write_real1(const fs::path& path, const RMatrix& m) {
  auto out = open_out(path);
  write_header(out, kRealMagic, m.rows(), m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) detail::write_le<double>(out, m(r, c));
  }
  if (!out) throw IoError("failed writing " + path.string());
}

RMatrix read_real1(const fs::path& path) {
  auto in = open_in(path);
  const std::string ctx = path.string();
  if (read_magic(in, ctx) != std::string(kRealMagic, 8)) throw IoError(ctx + ": not a REAL1 file");
  return read_real_body(in, ctx);
}

std::variant<CMatrix, RMatrix> read_matrix(const fs::path& path) {
  auto in = open_in(path);
  const std::string ctx = path.string();
  const std::string magic = read_magic(in, ctx);
  if (magic == std::string(kCplxMagic, 8)) return read_cplx_body(in, ctx);
  if (magic == std::string(kRealMagic, 8)) return read_real_body(in, ctx);
  throw IoError(ctx + ": unknown matrix format");
}

fs::path sidecar_path(const fs::path& path) {
  fs::path p = path;
  p += ".json";
  return p;
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw IoError("cannot create " + tmp.string());
    out << text;
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_sidecar(const fs::path& path, const json& meta) {
  write_text_atomic(sidecar_path(path), meta.dump(2) + "\n");
}

json read_sidecar(const fs::path& path) {
  const fs::path sc = sidecar_path(path);
  std::ifstream in(sc);
  if (!in) throw IoError("missing sidecar " + sc.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(sc.string() + ": " + e.what());
  }
}

void save_contrast(const fs::path& path, const ContrastField& m, const json& extra) {
  write_cplx1(path, m.values);
  json meta = extra;
  meta["kind"] = "contrast";
  meta["rho"] = m.grid.rho();
  meta["n"] = m.grid.n();
  write_sidecar(path, meta);
}

ContrastField load_contrast(const fs::path& path) {
  const json meta = read_sidecar(path);
  const Grid grid = grid_from(meta, path);
  CMatrix v = read_cplx1(path);
  check_shape(v.rows(), v.cols(), grid.n(), grid.n(), path);
  return ContrastField(grid, std::move(v));
}

void save_far_field(const fs::path& path, const FarFieldMatrix& u, std::uint64_t seed) {
  write_cplx1(path, u.values);
  write_sidecar(path, json{{"kind", "farfield"},
                           {"P", u.observation.count()},
                           {"Q", u.incident.count()},
                           {"k", u.wave_number},
                           {"delta", u.noise_level},
                           {"seed", seed}});
}

FarFieldMatrix load_far_field(const fs::path& path) {
  const json meta = read_sidecar(path);
  const int p = meta_value<int>(meta, "P", path);
  const int q = meta_value<int>(meta, "Q", path);
  CMatrix v = read_cplx1(path);
  check_shape(v.rows(), v.cols(), p, q, path);
  try {
    return FarFieldMatrix(std::move(v), meta_value<double>(meta, "k", path), DirectionSet(q),
                          DirectionSet(p), meta.value("delta", 0.0));
  } catch (const ConfigError& e) {
    throw IoError(sidecar_path(path).string() + ": " + e.what());
  }
}

void save_imaging(const fs::path& path, const ImagingMatrix& image, int p, int q, double delta) {
  write_real1(path, image.values);
  write_sidecar(path, json{{"kind", "imaging"},
                           {"rho", image.grid.rho()},
                           {"n", image.grid.n()},
                           {"k0", image.wave_number},
                           {"P", p},
                           {"Q", q},
                           {"delta", delta}});
}

ImagingMatrix load_imaging(const fs::path& path) {
  const json meta = read_sidecar(path);
  const Grid grid = grid_from(meta, path);
  RMatrix v = read_real1(path);
  check_shape(v.rows(), v.cols(), grid.n(), grid.n(), path);
  return {grid, std::move(v), meta_value<double>(meta, "k0", path)};
}

void save_mask(const fs::path& path, const SupportMask& mask) {
  write_real1(path, mask.values);
  write_sidecar(path, json{{"kind", "mask"}, {"rho", mask.grid.rho()}, {"n", mask.grid.n()}});
}

SupportMask load_mask(const fs::path& path) {
  const json meta = read_sidecar(path);
  const Grid grid = grid_from(meta, path);
  RMatrix v = read_real1(path);
  check_shape(v.rows(), v.cols(), grid.n(), grid.n(), path);
  try {
    return SupportMask(grid, std::move(v));
  } catch (const ConfigError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void export_pgm(const fs::path& path, const RMatrix& m) {
  const double lo = m.size() ? m.minCoeff() : 0.0;
  const double hi = m.size() ? m.maxCoeff() : 0.0;
  const double span = hi - lo;
  auto out = open_out(path);
  out << "P5\n" << m.rows() << " " << m.cols() << "\n65535\n";
  // width = rows (x index), height = cols (y index), top row = largest y
  for (Eigen::Index j = m.cols() - 1; j >= 0; --j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double t = span > 0.0 ? (m(i, j) - lo) / span : 0.0;
      const auto level = static_cast<std::uint16_t>(std::lround(std::clamp(t, 0.0, 1.0) * 65535.0));
      const char bytes[2] = {static_cast<char>(level >> 8), static_cast<char>(level & 0xff)};
      out.write(bytes, 2);
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
  write_sidecar(path, json{{"kind", "pgm"}, {"min", lo}, {"max", hi}, {"maxval", 65535},
                           {"orientation", "columns along x, rows from largest y"}});
}

void export_csv(const fs::path& path, const RMatrix& m) {
  auto out = open_out(path);
  out << std::setprecision(17);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << m(r, c);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

RMatrix read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw IoError(path.string() + ": bad number '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw IoError(path.string() + ": ragged CSV");
    }
    rows.push_back(std::move(row));
  }
  RMatrix m(static_cast<Eigen::Index>(rows.size()),
            rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

std::string file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::uint64_t h = 14695981039346656037ULL;
  char buf[1 << 14];
  while (in) {
    in.read(buf, sizeof(buf));
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

}  // namespace scatterkit::io
