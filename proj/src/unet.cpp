#include "scatterkit/unet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <zlib.h>

#include "binary_io.hpp"
#include "scatterkit/error.hpp"
#include "scatterkit/rng.hpp"

namespace scatterkit {

namespace {

constexpr char kMagic[8] = {'U', 'N', 'E', 'T', 'W', '1', '\0', '\0'};

std::string shape_string(const std::vector<std::uint32_t>& shape) {
  std::string s;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(shape[i]);
  }
  return s;
}

void add_conv(std::vector<std::pair<std::string, std::vector<std::uint32_t>>>& layers,
              const std::string& name, std::uint32_t out, std::uint32_t in, std::uint32_t k) {
  layers.push_back({name + ".weight", {out, in, k, k}});
  layers.push_back({name + ".bias", {out}});
}

// Feature map stored [channel][row][col].
struct Volume {
  int channels = 0;
  int size = 0;
  std::vector<float> data;

  Volume(int c, int s) : channels(c), size(s), data(static_cast<std::size_t>(c) * s * s, 0.0f) {}
  float* plane(int c) { return data.data() + static_cast<std::size_t>(c) * size * size; }
  const float* plane(int c) const { return data.data() + static_cast<std::size_t>(c) * size * size; }
};

Volume conv(const Volume& in, const Tensor& weight, const Tensor& bias, bool relu) {
  const int out_ch = static_cast<int>(weight.shape[0]);
  const int in_ch = static_cast<int>(weight.shape[1]);
  const int ks = static_cast<int>(weight.shape[2]);
  const int pad = ks / 2;
  const int s = in.size;
  Volume out(out_ch, s);
  for (int o = 0; o < out_ch; ++o) {
    float* dst = out.plane(o);
    std::fill(dst, dst + s * s, bias.data[o]);
    for (int c = 0; c < in_ch; ++c) {
      const float* src = in.plane(c);
      const float* w = weight.data.data() + (static_cast<std::size_t>(o) * in_ch + c) * ks * ks;
      for (int ky = 0; ky < ks; ++ky) {
        const int dy = ky - pad;
        const int y0 = std::max(0, -dy);
        const int y1 = std::min(s, s - dy);
        for (int kx = 0; kx < ks; ++kx) {
          const int dx = kx - pad;
          const float wv = w[ky * ks + kx];
          const int x0 = std::max(0, -dx);
          const int x1 = std::min(s, s - dx);
          for (int y = y0; y < y1; ++y) {
            float* drow = dst + y * s;
            const float* srow = src + (y + dy) * s + dx;
            for (int x = x0; x < x1; ++x) drow[x] += wv * srow[x];
          }
        }
      }
    }
    if (relu) {
      for (int t = 0; t < s * s; ++t) dst[t] = std::max(dst[t], 0.0f);
    }
  }
  return out;
}

Volume max_pool(const Volume& in) {
  const int s = in.size / 2;
  Volume out(in.channels, s);
  for (int c = 0; c < in.channels; ++c) {
    const float* src = in.plane(c);
    float* dst = out.plane(c);
    for (int y = 0; y < s; ++y) {
      for (int x = 0; x < s; ++x) {
        const float* p = src + 2 * y * in.size + 2 * x;
        dst[y * s + x] = std::max(std::max(p[0], p[1]), std::max(p[in.size], p[in.size + 1]));
      }
    }
  }
  return out;
}

Volume upsample(const Volume& in) {
  const int s = in.size * 2;
  Volume out(in.channels, s);
  for (int c = 0; c < in.channels; ++c) {
    const float* src = in.plane(c);
    float* dst = out.plane(c);
    for (int y = 0; y < s; ++y) {
      for (int x = 0; x < s; ++x) dst[y * s + x] = src[(y / 2) * in.size + x / 2];
    }
  }
  return out;
}

Volume concat(const Volume& a, const Volume& b) {
  Volume out(a.channels + b.channels, a.size);
  std::copy(a.data.begin(), a.data.end(), out.data.begin());
  std::copy(b.data.begin(), b.data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(a.data.size()));
  return out;
}

}  // namespace

std::size_t Tensor::element_count() const {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         [](std::size_t a, std::uint32_t b) { return a * b; });
}

std::vector<std::pair<std::string, std::vector<std::uint32_t>>> unet_architecture() {
  std::vector<std::pair<std::string, std::vector<std::uint32_t>>> layers;
  add_conv(layers, "enc1.conv1", 32, 1, 3);
  add_conv(layers, "enc1.conv2", 32, 32, 3);
  add_conv(layers, "enc2.conv1", 64, 32, 3);
  add_conv(layers, "enc2.conv2", 64, 64, 3);
  add_conv(layers, "enc3.conv1", 128, 64, 3);
  add_conv(layers, "enc3.conv2", 128, 128, 3);
  add_conv(layers, "bottleneck.conv1", 256, 128, 3);
  add_conv(layers, "bottleneck.conv2", 256, 256, 3);
  add_conv(layers, "dec3.up", 128, 256, 3);
  add_conv(layers, "dec3.conv1", 128, 256, 3);
  add_conv(layers, "dec3.conv2", 128, 128, 3);
  add_conv(layers, "dec2.up", 64, 128, 3);
  add_conv(layers, "dec2.conv1", 64, 128, 3);
  add_conv(layers, "dec2.conv2", 64, 64, 3);
  add_conv(layers, "dec1.up", 32, 64, 3);
  add_conv(layers, "dec1.conv1", 32, 64, 3);
  add_conv(layers, "dec1.conv2", 32, 32, 3);
  add_conv(layers, "head", 1, 32, 1);
  return layers;
}

std::uint32_t architecture_fingerprint(
    const std::vector<std::pair<std::string, std::vector<std::uint32_t>>>& layers) {
  std::string text;
  for (const auto& [name, shape] : layers) text += name + ":" + shape_string(shape);
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(text.data()), static_cast<uInt>(text.size())));
}

NetworkWeights::NetworkWeights(std::vector<Tensor> tensors, std::uint32_t fingerprint)
    : tensors_(std::move(tensors)), fingerprint_(fingerprint) {}

NetworkWeights NetworkWeights::xavier(std::uint64_t seed) {
  Rng rng(seed);
  const auto arch = unet_architecture();
  std::vector<Tensor> tensors;
  for (const auto& [name, shape] : arch) {
    Tensor t{name, shape, {}};
    t.data.assign(t.element_count(), 0.0f);
    if (shape.size() == 4) {
      const double receptive = static_cast<double>(shape[2]) * shape[3];
      const double bound = std::sqrt(6.0 / ((shape[0] + shape[1]) * receptive));
      for (auto& v : t.data) v = static_cast<float>(rng.uniform(-bound, bound));
    }
    tensors.push_back(std::move(t));
  }
  return NetworkWeights(std::move(tensors), architecture_fingerprint(arch));
}

const Tensor& NetworkWeights::get(const std::string& name) const {
  for (const auto& t : tensors_) {
    if (t.name == name) return t;
  }
  throw ConfigError("network weights have no tensor named '" + name + "'");
}

Tensor& NetworkWeights::get(const std::string& name) {
  return const_cast<Tensor&>(static_cast<const NetworkWeights&>(*this).get(name));
}

void NetworkWeights::validate() const {
  const auto arch = unet_architecture();
  const std::size_t common = std::min(arch.size(), tensors_.size());
  for (std::size_t i = 0; i < common; ++i) {
    const auto& [name, shape] = arch[i];
    const Tensor& t = tensors_[i];
    if (t.name != name || t.shape != shape) {
      throw ConfigError("weights layer " + std::to_string(i) + " is '" + t.name + "' [" +
                        shape_string(t.shape) + "], expected '" + name + "' [" +
                        shape_string(shape) + "]");
    }
    if (t.data.size() != t.element_count()) {
      throw ConfigError("weights layer '" + t.name + "' holds " + std::to_string(t.data.size()) +
                        " values for shape [" + shape_string(t.shape) + "]");
    }
  }
  if (tensors_.size() < arch.size()) {
    throw ConfigError("weights end before layer '" + arch[tensors_.size()].first + "'");
  }
  if (tensors_.size() > arch.size()) {
    throw ConfigError("unexpected extra weights layer '" + tensors_[arch.size()].name + "'");
  }
  if (fingerprint_ != architecture_fingerprint(arch)) {
    throw ConfigError("weights architecture fingerprint mismatch");
  }
}

NetworkWeights read_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open weights file " + path.string());
  const std::string ctx = "weights file " + path.string();
  char magic[8];
  in.read(magic, 8);
  if (!in || !std::equal(magic, magic + 8, kMagic)) throw IoError(ctx + ": bad magic");
  const auto count = detail::read_le<std::uint32_t>(in, ctx);
  if (count > 4096) throw IoError(ctx + ": implausible layer count " + std::to_string(count));
  std::vector<Tensor> tensors(count);
  for (auto& t : tensors) {
    const auto len = detail::read_le<std::uint16_t>(in, ctx);
    t.name.resize(len);
    in.read(t.name.data(), len);
    const auto ndim = detail::read_le<std::uint8_t>(in, ctx);
    t.shape.resize(ndim);
    for (auto& d : t.shape) d = detail::read_le<std::uint32_t>(in, ctx);
    const std::size_t n = t.element_count();
    if (n > (std::size_t{1} << 28)) throw IoError(ctx + ": tensor '" + t.name + "' too large");
    t.data.resize(n);
    for (auto& v : t.data) v = detail::read_le<float>(in, ctx);
  }
  const auto fingerprint = detail::read_le<std::uint32_t>(in, ctx);
  return NetworkWeights(std::move(tensors), fingerprint);
}

void write_weights(const NetworkWeights& weights, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create weights file " + path.string());
  out.write(kMagic, 8);
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(weights.tensors().size()));
  for (const auto& t : weights.tensors()) {
    detail::write_le<std::uint16_t>(out, static_cast<std::uint16_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    detail::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(t.shape.size()));
    for (auto d : t.shape) detail::write_le<std::uint32_t>(out, d);
    for (auto v : t.data) detail::write_le<float>(out, v);
  }
  detail::write_le<std::uint32_t>(out, weights.fingerprint());
  if (!out) throw IoError("failed writing weights file " + path.string());
}

RMatrix unet_infer(const NetworkWeights& weights, const RMatrix& input) {
  weights.validate();
  if (input.rows() != kUnetInputSize || input.cols() != kUnetInputSize) {
    throw ConfigError("network input must be 80x80");
  }
  auto layer = [&](const Volume& v, const std::string& name, bool relu = true) {
    return conv(v, weights.get(name + ".weight"), weights.get(name + ".bias"), relu);
  };

  // plane rows follow the matrix's first index
  Volume x(1, kUnetInputSize);
  for (int r = 0; r < kUnetInputSize; ++r) {
    for (int c = 0; c < kUnetInputSize; ++c) x.data[r * kUnetInputSize + c] = static_cast<float>(input(r, c));
  }

  const Volume e1 = layer(layer(x, "enc1.conv1"), "enc1.conv2");
  const Volume e2 = layer(layer(max_pool(e1), "enc2.conv1"), "enc2.conv2");
  const Volume e3 = layer(layer(max_pool(e2), "enc3.conv1"), "enc3.conv2");
  const Volume b = layer(layer(max_pool(e3), "bottleneck.conv1"), "bottleneck.conv2");
  const Volume d3 = layer(layer(concat(layer(upsample(b), "dec3.up"), e3), "dec3.conv1"), "dec3.conv2");
  const Volume d2 = layer(layer(concat(layer(upsample(d3), "dec2.up"), e2), "dec2.conv1"), "dec2.conv2");
  const Volume d1 = layer(layer(concat(layer(upsample(d2), "dec1.up"), e1), "dec1.conv1"), "dec1.conv2");
  const Volume logits = layer(d1, "head", false);

  RMatrix out(kUnetInputSize, kUnetInputSize);
  for (int r = 0; r < kUnetInputSize; ++r) {
    for (int c = 0; c < kUnetInputSize; ++c) {
      const float z = logits.data[r * kUnetInputSize + c];
      out(r, c) = static_cast<double>(1.0f / (1.0f + std::exp(-z)));
    }
  }
  return out;
}

}  // namespace scatterkit
