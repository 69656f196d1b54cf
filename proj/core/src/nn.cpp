#include "hexcnn/nn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "hexcnn/random.hpp"
#include "hexcnn/zeroout.hpp"

namespace hexcnn::nn {
namespace {

std::string layer_label(std::size_t index, LayerKind kind) {
  return "layer " + std::to_string(index) + " (" + to_string(kind) + ")";
}

[[noreturn]] void chain_error(std::size_t index, LayerKind kind, const std::string& what) {
  throw ShapeError(layer_label(index, kind) + ": " + what);
}

TensorShape hex_shape(int side, int channels) {
  return {true, side, channels, static_cast<std::size_t>(channels) * cell_count(side)};
}

TensorShape vec_shape(std::size_t length) { return {false, 0, 0, length}; }

// Resolves the geometry of a windowed layer and returns its output side.
int windowed_output(std::size_t index, const LayerSpec& spec, const TensorShape& in,
                    StrideRounding& resolved) {
  if (!in.hex) chain_error(index, spec.kind, "needs a hexagonal input, got a flat vector");
  if (spec.window_side < 1 || spec.stride < 1) {
    chain_error(index, spec.kind, "window side and stride must be >= 1");
  }
  if (spec.window_side > in.side) {
    chain_error(index, spec.kind,
                "window side " + std::to_string(spec.window_side) + " exceeds input side " +
                    std::to_string(in.side) + "; the stack exhausts the input");
  }
  const bool tiles = (in.side - spec.window_side) % spec.stride == 0;
  if (!tiles && spec.rounding == StrideRounding::exact) {
    chain_error(index, spec.kind,
                "stride " + std::to_string(spec.stride) + " does not tile side " +
                    std::to_string(in.side) + " (floor rounding not enabled)");
  }
  resolved = tiles ? StrideRounding::exact : StrideRounding::floor;
  return ConvGeometry::valid(in.side, spec.window_side, spec.stride, resolved).output_side;
}

double glorot_bound(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

FilterBank conv_bank(const Network::Layer& layer) {
  const LayerInfo& info = layer.info;
  return FilterBank(info.spec.filters, info.input.channels, info.spec.window_side, layer.weights,
                    layer.bias);
}

std::vector<double> dense_forward(const Network::Layer& layer, std::span<const double> x) {
  const std::size_t in = layer.info.input.length;
  const std::size_t units = layer.info.output.length;
  std::vector<double> y(units);
  for (std::size_t o = 0; o < units; ++o) {
    const double* w = layer.weights.data() + o * in;
    double acc = 0.0;
    for (std::size_t i = 0; i < in; ++i) acc += w[i] * x[i];
    y[o] = acc + layer.bias[o];
  }
  return y;
}

void activate(std::vector<double>& v, Activation kind) {
  if (kind == Activation::relu) {
    for (double& x : v) x = x > 0.0 ? x : 0.0;
  }
}

}  // namespace

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::hexconv: return "hexconv";
    case LayerKind::hexmaxpool: return "hexmaxpool";
    case LayerKind::hexavgpool: return "hexavgpool";
    case LayerKind::flatten: return "flatten";
    case LayerKind::dense: return "dense";
    case LayerKind::softmax_xent: return "softmax_xent";
  }
  return "unknown";
}

std::string TensorShape::to_string() const {
  if (hex) return "hex(side=" + std::to_string(side) + ", channels=" + std::to_string(channels) + ")";
  return "vec(" + std::to_string(length) + ")";
}

LayerSpec LayerSpec::conv(int filters, int side, int stride, Activation act,
                          StrideRounding rounding) {
  LayerSpec s;
  s.kind = LayerKind::hexconv;
  s.filters = filters;
  s.window_side = side;
  s.stride = stride;
  s.activation = act;
  s.rounding = rounding;
  return s;
}

LayerSpec LayerSpec::maxpool(int side, int stride, StrideRounding rounding) {
  LayerSpec s;
  s.kind = LayerKind::hexmaxpool;
  s.window_side = side;
  s.stride = stride;
  s.rounding = rounding;
  return s;
}

LayerSpec LayerSpec::avgpool(int side, int stride, StrideRounding rounding) {
  LayerSpec s = maxpool(side, stride, rounding);
  s.kind = LayerKind::hexavgpool;
  return s;
}

LayerSpec LayerSpec::flatten() { return LayerSpec{}; }

LayerSpec LayerSpec::dense(int units, Activation act) {
  LayerSpec s;
  s.kind = LayerKind::dense;
  s.units = units;
  s.activation = act;
  return s;
}

LayerSpec LayerSpec::softmax_xent() {
  LayerSpec s;
  s.kind = LayerKind::softmax_xent;
  return s;
}

std::vector<LayerInfo> infer_shapes(const NetworkConfig& cfg) {
  if (cfg.input_side < 1 || cfg.input_channels < 1) {
    throw ShapeError("network input needs side >= 1 and channels >= 1");
  }
  if (cfg.layers.empty()) throw ShapeError("network has no layers");
  std::vector<LayerInfo> infos;
  TensorShape cur = hex_shape(cfg.input_side, cfg.input_channels);
  for (std::size_t i = 0; i < cfg.layers.size(); ++i) {
    const LayerSpec& spec = cfg.layers[i];
    LayerInfo info;
    info.spec = spec;
    info.input = cur;
    switch (spec.kind) {
      case LayerKind::hexconv: {
        if (spec.filters < 1) chain_error(i, spec.kind, "needs at least one filter");
        const int side = windowed_output(i, spec, cur, info.resolved_rounding);
        const std::size_t ek = cell_count(spec.window_side);
        info.parameters = static_cast<std::size_t>(spec.filters) *
                              static_cast<std::size_t>(cur.channels) * ek +
                          static_cast<std::size_t>(spec.filters);
        info.output = hex_shape(side, spec.filters);
        break;
      }
      case LayerKind::hexmaxpool:
      case LayerKind::hexavgpool: {
        const int side = windowed_output(i, spec, cur, info.resolved_rounding);
        info.output = hex_shape(side, cur.channels);
        break;
      }
      case LayerKind::flatten:
        if (!cur.hex) chain_error(i, spec.kind, "input is already flat");
        info.output = vec_shape(cur.length);
        break;
      case LayerKind::dense:
        if (cur.hex) chain_error(i, spec.kind, "needs a flat input; insert flatten first");
        if (spec.units < 1) chain_error(i, spec.kind, "needs at least one unit");
        info.parameters = static_cast<std::size_t>(spec.units) * cur.length +
                          static_cast<std::size_t>(spec.units);
        info.output = vec_shape(static_cast<std::size_t>(spec.units));
        break;
      case LayerKind::softmax_xent:
        if (cur.hex) chain_error(i, spec.kind, "needs a flat input");
        if (i + 1 != cfg.layers.size()) chain_error(i, spec.kind, "must be the last layer");
        info.output = cur;
        break;
    }
    cur = info.output;
    infos.push_back(info);
  }
  return infos;
}

std::size_t Network::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const Layer& l : layers_) n += l.weights.size() + l.bias.size();
  return n;
}

std::vector<double> Network::flat_parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const Layer& l : layers_) {
    out.insert(out.end(), l.weights.begin(), l.weights.end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
  }
  return out;
}

void Network::set_flat_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) {
    throw ShapeError("expected " + std::to_string(parameter_count()) + " parameters, got " +
                     std::to_string(values.size()));
  }
  ++version_;
  std::size_t k = 0;
  for (Layer& l : layers_) {
    for (double& w : l.weights) w = values[k++];
    for (double& b : l.bias) b = values[k++];
  }
}

std::vector<std::span<double>> Network::parameter_blocks() {
  ++version_;
  std::vector<std::span<double>> blocks;
  for (Layer& l : layers_) {
    if (!l.weights.empty()) blocks.emplace_back(l.weights);
    if (!l.bias.empty()) blocks.emplace_back(l.bias);
  }
  return blocks;
}

Network build_network(const NetworkConfig& cfg) {
  Network net;
  net.config_ = cfg;
  Rng rng(cfg.seed);
  for (const LayerInfo& info : infer_shapes(cfg)) {
    Network::Layer layer;
    layer.info = info;
    std::size_t fan_in = 0;
    std::size_t fan_out = 0;
    if (info.spec.kind == LayerKind::hexconv) {
      const std::size_t ek = cell_count(info.spec.window_side);
      fan_in = static_cast<std::size_t>(info.input.channels) * ek;
      fan_out = static_cast<std::size_t>(info.spec.filters) * ek;
      layer.weights.resize(fan_in * static_cast<std::size_t>(info.spec.filters));
      layer.bias.assign(static_cast<std::size_t>(info.spec.filters), 0.0);
    } else if (info.spec.kind == LayerKind::dense) {
      fan_in = info.input.length;
      fan_out = static_cast<std::size_t>(info.spec.units);
      layer.weights.resize(fan_in * fan_out);
      layer.bias.assign(fan_out, 0.0);
    }
    if (!layer.weights.empty()) {
      const double a = glorot_bound(fan_in, fan_out);
      for (double& w : layer.weights) w = rng.uniform(-a, a);
    }
    net.layers_.push_back(std::move(layer));
  }
  return net;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.begin(), logits.end());
  if (p.empty()) return p;
  const double top = *std::max_element(p.begin(), p.end());
  double sum = 0.0;
  for (double& v : p) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

double cross_entropy(std::span<const double> logits, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= logits.size()) {
    throw ShapeError("label " + std::to_string(label) + " outside [0, " +
                     std::to_string(logits.size()) + ")");
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - top);
  return std::log(sum) + top - logits[static_cast<std::size_t>(label)];
}

ForwardResult forward(const Network& net, std::span<const HexTensor> batch) {
  const NetworkConfig& cfg = net.config();
  ForwardResult res;
  res.parameter_version = net.version();
  res.backend = net.backend();
  const bool ref = net.backend() == Backend::zeroout;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const HexTensor& sample = batch[b];
    if (sample.side() != cfg.input_side || sample.channels() != cfg.input_channels) {
      throw ShapeError("sample " + std::to_string(b) + " is " +
                       describe(sample.shape(), sample.channels()) + ", network expects " +
                       describe(HexShape(cfg.input_side), cfg.input_channels));
    }
    std::vector<LayerCache> caches(net.layers().size());
    HexTensor hex = sample;
    std::vector<double> vec;
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
      const Network::Layer& layer = net.layers()[i];
      const LayerInfo& info = layer.info;
      LayerCache& cache = caches[i];
      switch (info.spec.kind) {
        case LayerKind::hexconv: {
          const FilterBank bank = conv_bank(layer);
          cache.hex_input = hex;
          cache.hex_preact = ref ? zeroout_conv(hex, bank, info.spec.stride, ConvMode::valid,
                                                info.resolved_rounding)
                                 : conv_valid(hex, bank, info.spec.stride, info.resolved_rounding);
          hex = apply_activation(cache.hex_preact, info.spec.activation);
          break;
        }
        case LayerKind::hexmaxpool: {
          auto pooled = ref ? zeroout::maxpool(hex, info.spec.window_side, info.spec.stride,
                                               info.resolved_rounding)
                            : maxpool(hex, info.spec.window_side, info.spec.stride,
                                      info.resolved_rounding);
          cache.argmax = std::move(pooled.argmax);
          hex = std::move(pooled.output);
          break;
        }
        case LayerKind::hexavgpool:
          hex = ref ? zeroout::avgpool(hex, info.spec.window_side, info.spec.stride,
                                       info.resolved_rounding)
                    : avgpool(hex, info.spec.window_side, info.spec.stride, info.resolved_rounding);
          break;
        case LayerKind::flatten:
          vec.assign(hex.values().begin(), hex.values().end());
          break;
        case LayerKind::dense:
          cache.vec_input = vec;
          cache.vec_preact = dense_forward(layer, vec);
          vec = cache.vec_preact;
          activate(vec, info.spec.activation);
          break;
        case LayerKind::softmax_xent:
          break;
      }
    }
    if (net.layers().back().info.output.hex) vec.assign(hex.values().begin(), hex.values().end());
    res.logits.push_back(std::move(vec));
    res.caches.push_back(std::move(caches));
  }
  return res;
}

Gradients backward(const Network& net, const ForwardResult& fwd, std::span<const int> labels) {
  if (fwd.parameter_version != net.version() || fwd.backend != net.backend()) {
    throw ShapeError("stale forward caches: parameters or backend changed since forward()");
  }
  if (labels.size() != fwd.logits.size()) {
    throw ShapeError("batch has " + std::to_string(fwd.logits.size()) + " samples but " +
                     std::to_string(labels.size()) + " labels");
  }
  const auto& layers = net.layers();
  if (layers.back().info.spec.kind != LayerKind::softmax_xent) {
    throw ShapeError("backward needs a network ending in softmax_xent");
  }
  const bool ref = net.backend() == Backend::zeroout;
  const double inv_batch = fwd.logits.empty() ? 0.0 : 1.0 / static_cast<double>(fwd.logits.size());

  Gradients grads;
  for (const Network::Layer& l : layers) {
    if (!l.weights.empty()) grads.blocks.emplace_back(l.weights.size(), 0.0);
    if (!l.bias.empty()) grads.blocks.emplace_back(l.bias.size(), 0.0);
  }

  for (std::size_t b = 0; b < fwd.logits.size(); ++b) {
    const auto& caches = fwd.caches[b];
    if (caches.size() != layers.size()) throw ShapeError("stale forward caches: layer count differs");
    const std::vector<double>& logits = fwd.logits[b];
    grads.loss += cross_entropy(logits, labels[b]) * inv_batch;

    std::vector<double> vec = softmax(logits);
    vec[static_cast<std::size_t>(labels[b])] -= 1.0;
    for (double& v : vec) v *= inv_batch;
    HexTensor hex;

    // Parameter blocks are laid out layer by layer, so walk them backwards too.
    std::size_t block = grads.blocks.size();
    for (std::size_t i = layers.size(); i-- > 0;) {
      const Network::Layer& layer = layers[i];
      const LayerInfo& info = layer.info;
      const LayerCache& cache = caches[i];
      const bool first = i == 0;
      switch (info.spec.kind) {
        case LayerKind::softmax_xent:
          break;
        case LayerKind::dense: {
          const std::size_t in = info.input.length;
          const std::size_t units = info.output.length;
          for (std::size_t o = 0; o < units; ++o) {
            if (info.spec.activation == Activation::relu && !(cache.vec_preact[o] > 0.0)) vec[o] = 0.0;
          }
          auto& gb = grads.blocks[--block];
          auto& gw = grads.blocks[--block];
          for (std::size_t o = 0; o < units; ++o) {
            const double d = vec[o];
            double* row = gw.data() + o * in;
            for (std::size_t k = 0; k < in; ++k) row[k] += d * cache.vec_input[k];
            gb[o] += d;
          }
          if (!first) {
            std::vector<double> dx(in, 0.0);
            for (std::size_t o = 0; o < units; ++o) {
              const double d = vec[o];
              const double* row = layer.weights.data() + o * in;
              for (std::size_t k = 0; k < in; ++k) dx[k] += row[k] * d;
            }
            vec = std::move(dx);
          }
          break;
        }
        case LayerKind::flatten:
          hex = HexTensor(HexShape(info.input.side), info.input.channels, vec);
          break;
        case LayerKind::hexconv: {
          const HexTensor delta =
              apply_activation_backward(hex, cache.hex_preact, info.spec.activation);
          const int stride = info.spec.stride;
          const int side = info.spec.window_side;
          const FilterGradients<double> fg =
              ref ? zeroout::conv_backward_filter(cache.hex_input, delta, side, stride)
                  : conv_backward_filter(cache.hex_input, delta, side, stride);
          auto& gb = grads.blocks[--block];
          auto& gw = grads.blocks[--block];
          for (std::size_t k = 0; k < gw.size(); ++k) gw[k] += fg.weights[k];
          for (std::size_t k = 0; k < gb.size(); ++k) gb[k] += fg.bias[k];
          if (!first) {
            const FilterBank bank = conv_bank(layer);
            hex = ref ? zeroout::conv_backward_input(delta, bank, stride, info.input.side)
                      : conv_backward_input(delta, bank, stride, info.input.side);
          }
          break;
        }
        case LayerKind::hexmaxpool:
          hex = ref ? zeroout::maxpool_backward(hex, cache.argmax, info.input.side)
                    : maxpool_backward(hex, cache.argmax, info.input.side);
          break;
        case LayerKind::hexavgpool:
          hex = ref ? zeroout::avgpool_backward(hex, info.spec.window_side, info.spec.stride,
                                                info.input.side)
                    : avgpool_backward(hex, info.spec.window_side, info.spec.stride, info.input.side);
          break;
      }
    }
  }
  return grads;
}

double train_step(Network& net, std::span<const HexTensor> batch, std::span<const int> labels,
                  const TrainConfig& tc) {
  if (!(tc.learning_rate >= 0.0)) throw ShapeError("learning rate must be non-negative");
  const ForwardResult fwd = forward(net, batch);
  const Gradients g = backward(net, fwd, labels);
  auto blocks = net.parameter_blocks();
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    auto& p = blocks[k];
    const auto& d = g.blocks[k];
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= tc.learning_rate * d[i];
  }
  return g.loss;
}

std::vector<double> train(Network& net, const io::Dataset& data, const TrainConfig& tc) {
  if (data.samples.empty()) throw ShapeError("empty dataset");
  if (tc.batch_size < 1 || tc.steps < 1) throw ShapeError("batch size and steps must be >= 1");
  Rng rng(tc.seed);
  std::vector<std::size_t> order(data.samples.size());
  std::size_t cursor = order.size();
  std::vector<double> losses;
  losses.reserve(static_cast<std::size_t>(tc.steps));
  std::vector<HexTensor> batch;
  std::vector<int> labels;
  for (int step = 0; step < tc.steps; ++step) {
    batch.clear();
    labels.clear();
    while (batch.size() < static_cast<std::size_t>(tc.batch_size)) {
      if (cursor == order.size()) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = order.size(); i > 1; --i) {
          std::swap(order[i - 1], order[static_cast<std::size_t>(rng.next() % i)]);
        }
        cursor = 0;
      }
      const std::size_t idx = order[cursor++];
      batch.push_back(data.samples[idx]);
      labels.push_back(data.labels[idx]);
    }
    losses.push_back(train_step(net, batch, labels, tc));
  }
  return losses;
}

namespace {

NetworkConfig lenet_like(int input_side, int input_channels, int first_filters,
                         std::vector<int> hidden, int classes) {
  NetworkConfig cfg;
  cfg.input_side = input_side;
  cfg.input_channels = input_channels;
  cfg.layers = {
      LayerSpec::conv(first_filters, 2, 1, Activation::relu),
      LayerSpec::maxpool(2, 3),
      LayerSpec::conv(16, 2, 1, Activation::relu),
      LayerSpec::maxpool(2, 3),
      LayerSpec::flatten(),
  };
  for (int units : hidden) cfg.layers.push_back(LayerSpec::dense(units, Activation::relu));
  cfg.layers.push_back(LayerSpec::dense(classes, Activation::identity));
  cfg.layers.push_back(LayerSpec::softmax_xent());
  if (classes < 2) throw ShapeError("a classifier needs at least two classes");
  infer_shapes(cfg);
  return cfg;
}

}  // namespace

NetworkConfig hex_lenet(int input_side, int classes, int input_channels) {
  return lenet_like(input_side, input_channels, 6, {120}, classes);
}

NetworkConfig hex_lenet4(int input_side, int classes, int input_channels) {
  return lenet_like(input_side, input_channels, 4, {120}, classes);
}

NetworkConfig hex_lenet5(int input_side, int classes, int input_channels) {
  return lenet_like(input_side, input_channels, 6, {120, 84}, classes);
}

NetworkConfig hex_vgg(int depth, int input_side, int classes, int input_channels) {
  std::vector<int> per_block;
  if (depth == 13) {
    per_block = {2, 2, 2, 2, 2};
  } else if (depth == 16) {
    per_block = {2, 2, 3, 3, 3};
  } else {
    throw ShapeError("hex VGG depth must be 13 or 16");
  }
  const int widths[] = {64, 128, 256, 512, 512};
  NetworkConfig cfg;
  cfg.input_side = input_side;
  cfg.input_channels = input_channels;
  for (std::size_t blk = 0; blk < per_block.size(); ++blk) {
    for (int k = 0; k < per_block[blk]; ++k) {
      cfg.layers.push_back(LayerSpec::conv(widths[blk], 2, 1, Activation::relu));
    }
    cfg.layers.push_back(LayerSpec::maxpool(2, 3));
  }
  cfg.layers.push_back(LayerSpec::flatten());
  cfg.layers.push_back(LayerSpec::dense(4096, Activation::relu));
  cfg.layers.push_back(LayerSpec::dense(4096, Activation::relu));
  cfg.layers.push_back(LayerSpec::dense(classes, Activation::identity));
  cfg.layers.push_back(LayerSpec::softmax_xent());
  infer_shapes(cfg);
  return cfg;
}

std::uint64_t config_digest(const NetworkConfig& cfg) {
  std::string canon = "in=" + std::to_string(cfg.input_side) + "x" + std::to_string(cfg.input_channels);
  for (const LayerSpec& s : cfg.layers) {
    canon += ";" + to_string(s.kind) + "," + std::to_string(s.filters) + "," +
             std::to_string(s.window_side) + "," + std::to_string(s.stride) + "," +
             std::to_string(s.units) + "," + std::to_string(static_cast<int>(s.activation)) + "," +
             std::to_string(static_cast<int>(s.rounding));
  }
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

void write_checkpoint(std::ostream& out, const Network& net) {
  out.write("HXM1", 4);
  io::write_u64(out, config_digest(net.config()));
  const std::vector<double> params = net.flat_parameters();
  io::write_u64(out, params.size());
  for (double p : params) io::write_f64(out, p);
  if (!out) throw FormatError("HXM1 write failed");
}

void read_checkpoint(std::istream& in, Network& net) {
  io::expect_magic(in, "HXM1");
  if (io::read_u64(in) != config_digest(net.config())) {
    throw FormatError("HXM1 checkpoint was written for a different architecture");
  }
  const std::uint64_t count = io::read_u64(in);
  if (count != net.parameter_count()) throw FormatError("HXM1 parameter count mismatch");
  std::vector<double> params(count);
  for (double& p : params) p = io::read_f64(in);
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("HXM1 has trailing data");
  net.set_flat_parameters(params);
}

void save_checkpoint(const std::filesystem::path& path, const Network& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  write_checkpoint(out, net);
}

void load_checkpoint(const std::filesystem::path& path, Network& net) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  read_checkpoint(in, net);
}

}  // namespace hexcnn::nn
