#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "scatterkit/grid.hpp"

namespace scatterkit {

/// Named float32 tensor, row-major; convolution kernels are [out][in][kh][kw].
struct Tensor {
  std::string name;
  std::vector<std::uint32_t> shape;
  std::vector<float> data;

  std::size_t element_count() const;
};

/// (name, shape) of every tensor of the support-extraction U-Net, in file order.
///
/// Encoder: enc{1,2,3}.conv{1,2} at widths 32/64/128 (3x3, zero pad 1, ReLU)
/// with 2x2 max-pool after each level; bottleneck.conv{1,2} at width 256.
/// Decoder level L (3, 2, 1): 2x nearest upsample, dec{L}.up (3x3, ReLU),
/// concatenation [upsampled, encoder skip] along channels, dec{L}.conv{1,2}
/// (3x3, ReLU). Head: 1x1 conv to one channel followed by a sigmoid.
/// Each convolution owns "<layer>.weight" and "<layer>.bias".
std::vector<std::pair<std::string, std::vector<std::uint32_t>>> unet_architecture();

/// CRC32 of the concatenated "name:d0xd1x..." strings.
std::uint32_t architecture_fingerprint(
    const std::vector<std::pair<std::string, std::vector<std::uint32_t>>>& layers);

class NetworkWeights {
 public:
  NetworkWeights() = default;
  NetworkWeights(std::vector<Tensor> tensors, std::uint32_t fingerprint);

  /// Xavier-uniform kernels and zero biases, deterministic in `seed`.
  static NetworkWeights xavier(std::uint64_t seed);

  const std::vector<Tensor>& tensors() const { return tensors_; }
  std::vector<Tensor>& tensors() { return tensors_; }
  std::uint32_t fingerprint() const { return fingerprint_; }
  const Tensor& get(const std::string& name) const;
  Tensor& get(const std::string& name);

  /// Throws ConfigError naming the first tensor whose name or shape departs
  /// from unet_architecture(), or reporting a fingerprint mismatch.
  void validate() const;

 private:
  std::vector<Tensor> tensors_;
  std::uint32_t fingerprint_ = 0;
};

/// UNETW1 reader/writer (little-endian).
NetworkWeights read_weights(const std::filesystem::path& path);
void write_weights(const NetworkWeights& weights, const std::filesystem::path& path);

/// Single-sample float32 forward pass on an 80x80 input; output in [0, 1].
RMatrix unet_infer(const NetworkWeights& weights, const RMatrix& input);

constexpr int kUnetInputSize = 80;

}  // namespace scatterkit
