#pragma once

// Backward kernels for hexagonal convolution and pooling layers.
//
// The input gradient of a strided valid convolution is computed by scattering
// the output error onto the dense anchor grid and running a full convolution
// against the channel-transposed, point-reflected filter bank.  It is the exact
// adjoint of conv_valid.

#include <vector>

#include "hexcnn/hexops.hpp"

namespace hexcnn {

enum class Activation { identity, relu };

template <class T>
struct FilterGradients {
  std::vector<T> weights;  // same layout as BasicFilterBank::weights()
  std::vector<T> bias;     // one per filter
};

template <class T>
struct LayerGradients {
  BasicHexTensor<T> input;
  FilterGradients<T> filters;
};

/// Places delta(u, v) at (s*u, s*v) of a side-((L_O-1)*s+1) hexagon; zeros elsewhere.
template <class T>
BasicHexTensor<T> upsample_stride(const BasicHexTensor<T>& delta, int stride, int target_side);

/// dE/dI for out = conv_valid(I, filters, stride). `input_side` is the side of
/// I; with floor rounding, input cells no window reached get zero gradient.
template <class T>
BasicHexTensor<T> conv_backward_input(const BasicHexTensor<T>& delta,
                                      const BasicFilterBank<T>& filters, int stride,
                                      int input_side);

/// dE/dk and dE/dbias for out = conv_valid(input, k, stride) with k of side
/// `filter_side`.
template <class T>
FilterGradients<T> conv_backward_filter(const BasicHexTensor<T>& input,
                                        const BasicHexTensor<T>& delta, int filter_side,
                                        int stride);

/// Routes each delta value to the input cell that won its window.
template <class T>
BasicHexTensor<T> maxpool_backward(const BasicHexTensor<T>& delta, const ArgmaxMap& map,
                                   int input_side);

template <class T>
BasicHexTensor<T> avgpool_backward(const BasicHexTensor<T>& delta, int window_side, int stride,
                                   int input_side);

template <class T>
BasicHexTensor<T> apply_activation(const BasicHexTensor<T>& preact, Activation kind);

/// delta * activation'(preact), elementwise.
template <class T>
BasicHexTensor<T> apply_activation_backward(const BasicHexTensor<T>& delta,
                                            const BasicHexTensor<T>& preact, Activation kind);

}  // namespace hexcnn
