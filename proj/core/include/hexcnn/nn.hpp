#pragma once

// Layered networks over hexagonal tensors: shape inference, forward and
// backward passes, softmax cross-entropy and plain SGD.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hexcnn/hexgrad.hpp"
#include "hexcnn/hexops.hpp"
#include "hexcnn/io.hpp"

namespace hexcnn::nn {

enum class LayerKind { hexconv, hexmaxpool, hexavgpool, flatten, dense, softmax_xent };

std::string to_string(LayerKind kind);

struct LayerSpec {
  LayerKind kind = LayerKind::flatten;
  int filters = 0;      // hexconv
  int window_side = 0;  // hexconv filter side, pool window side
  int stride = 1;
  int units = 0;        // dense
  Activation activation = Activation::identity;
  /// Allowed rounding when the stride does not tile the input. Layers that
  /// tile exactly always run in exact mode.
  StrideRounding rounding = StrideRounding::exact;

  static LayerSpec conv(int filters, int side, int stride, Activation act,
                        StrideRounding rounding = StrideRounding::exact);
  static LayerSpec maxpool(int side, int stride, StrideRounding rounding = StrideRounding::floor);
  static LayerSpec avgpool(int side, int stride, StrideRounding rounding = StrideRounding::floor);
  static LayerSpec flatten();
  static LayerSpec dense(int units, Activation act);
  static LayerSpec softmax_xent();
};

struct NetworkConfig {
  int input_side = 1;
  int input_channels = 1;
  std::vector<LayerSpec> layers;
  std::uint64_t seed = 1;
};

struct TrainConfig {
  double learning_rate = 0.01;
  int batch_size = 8;
  int steps = 1;
  std::uint64_t seed = 1;
};

/// Output shape of one layer: a hexagon (side, channels) or a flat vector.
struct TensorShape {
  bool hex = true;
  int side = 1;
  int channels = 1;
  std::size_t length = 1;  // total values

  std::string to_string() const;
};

struct LayerInfo {
  LayerSpec spec;
  TensorShape input;
  TensorShape output;
  StrideRounding resolved_rounding = StrideRounding::exact;
  std::size_t parameters = 0;
};

/// Validates the layer chain without allocating parameters. Throws
/// ShapeError naming the offending layer index.
std::vector<LayerInfo> infer_shapes(const NetworkConfig& cfg);

/// Which kernels realise the hexagonal layers.
enum class Backend { hex, zeroout };

class Network {
 public:
  struct Layer {
    LayerInfo info;
    std::vector<double> weights;  // conv: bank layout; dense: units x inputs, row-major
    std::vector<double> bias;
  };

  const NetworkConfig& config() const noexcept { return config_; }
  const std::vector<Layer>& layers() const noexcept { return layers_; }
  /// Mutable access; invalidates outstanding forward caches.
  std::vector<Layer>& mutable_layers() noexcept {
    ++version_;
    return layers_;
  }
  /// Bumped on every mutable access to the parameters.
  std::uint64_t version() const noexcept { return version_; }
  std::size_t parameter_count() const noexcept;
  std::size_t output_length() const noexcept { return layers_.back().info.output.length; }

  Backend backend() const noexcept { return backend_; }
  void set_backend(Backend b) noexcept { backend_ = b; }

  /// Every parameter, layer by layer (weights then bias).
  std::vector<double> flat_parameters() const;
  void set_flat_parameters(std::span<const double> values);

  /// Parameter block views in the same order as flat_parameters().
  /// Invalidates outstanding forward caches.
  std::vector<std::span<double>> parameter_blocks();

 private:
  friend Network build_network(const NetworkConfig& cfg);

  NetworkConfig config_;
  std::vector<Layer> layers_;
  Backend backend_ = Backend::hex;
  std::uint64_t version_ = 0;
};

/// Allocates and initialises parameters: weights uniform in
/// [-a, a], a = sqrt(6 / (fan_in + fan_out)); biases zero.
Network build_network(const NetworkConfig& cfg);

/// Per-layer state kept for the backward pass of one sample.
struct LayerCache {
  HexTensor hex_input;
  HexTensor hex_preact;
  std::vector<double> vec_input;
  std::vector<double> vec_preact;
  ArgmaxMap argmax;
};

struct ForwardResult {
  std::vector<std::vector<double>> logits;        // per sample
  std::vector<std::vector<LayerCache>> caches;    // per sample, per layer
  std::uint64_t parameter_version = 0;
  Backend backend = Backend::hex;
};

ForwardResult forward(const Network& net, std::span<const HexTensor> batch);

struct Gradients {
  double loss = 0.0;                      // mean cross-entropy over the batch
  std::vector<std::vector<double>> blocks;  // same order as parameter_blocks()
};

/// Gradients of the mean cross-entropy. `net` must be unchanged since the
/// forward call that produced `fwd`.
Gradients backward(const Network& net, const ForwardResult& fwd, std::span<const int> labels);

std::vector<double> softmax(std::span<const double> logits);
double cross_entropy(std::span<const double> logits, int label);

/// One SGD step on the batch; returns the loss before the update.
double train_step(Network& net, std::span<const HexTensor> batch, std::span<const int> labels,
                  const TrainConfig& tc);

/// Runs tc.steps SGD steps over the dataset, drawing batches from a seeded
/// per-epoch shuffle. Returns the per-step (pre-update) losses.
std::vector<double> train(Network& net, const io::Dataset& data, const TrainConfig& tc);

/// conv(6) -> maxpool -> conv(16) -> maxpool -> flatten -> dense(120, relu)
/// -> dense(classes) -> softmax_xent. All convs L_k=2, s=1, ReLU; pools L_k=2,
/// s=3 with floor rounding where 3 does not divide the side.
NetworkConfig hex_lenet(int input_side, int classes, int input_channels = 1);

/// Reconstructed presets for the hexagonalized LeNet-4/LeNet-5 and VGG-13/16
/// benchmarks. VGG configs are provided for shape inference and benchmarking.
NetworkConfig hex_lenet4(int input_side, int classes, int input_channels = 1);
NetworkConfig hex_lenet5(int input_side, int classes, int input_channels = 1);
NetworkConfig hex_vgg(int depth, int input_side, int classes, int input_channels = 3);

/// FNV-1a digest of the architecture (seed excluded).
std::uint64_t config_digest(const NetworkConfig& cfg);

/// HXM1: "HXM1", u64 config digest, u64 parameter count, then the
/// parameters in layer order as little-endian f64.
void write_checkpoint(std::ostream& out, const Network& net);
void read_checkpoint(std::istream& in, Network& net);
void save_checkpoint(const std::filesystem::path& path, const Network& net);
void load_checkpoint(const std::filesystem::path& path, Network& net);

}  // namespace hexcnn::nn
