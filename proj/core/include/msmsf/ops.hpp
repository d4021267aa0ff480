#pragma once

#include <cstddef>
#include <span>

#include "msmsf/tensor.hpp"

namespace msmsf {

struct Size2 {
  std::size_t h = 0;
  std::size_t w = 0;
  friend bool operator==(const Size2&, const Size2&) = default;
};

/// Convolution parameters. weight is (C_out, C_in, k_h, k_w); bias is
/// (1, C_out, 1, 1) or empty for no bias.
template <class T>
struct BasicConvParams {
  BasicTensor<T> weight;
  BasicTensor<T> bias;
  Size2 stride{1, 1};
  Size2 padding{0, 0};
};

using ConvParams = BasicConvParams<float>;

/// Output extent of a strided window op; throws ConfigError when < 1.
std::size_t conv_output_extent(std::size_t in, std::size_t pad, std::size_t kernel, std::size_t stride);

/// Cross-correlation with zero padding plus per-channel bias.
template <class T>
BasicTensor<T> conv2d(const BasicTensor<T>& input, const BasicConvParams<T>& params);

/// Max pooling with -inf padding. Ties route gradient to the first window
/// element in row-major order.
template <class T>
BasicTensor<T> maxpool2d(const BasicTensor<T>& input, std::size_t kernel = 3, std::size_t stride = 2,
                         std::size_t padding = 1);

template <class T>
BasicTensor<T> relu(const BasicTensor<T>& input);

template <class T>
BasicTensor<T> sigmoid(const BasicTensor<T>& input);

/// Per-channel transposed convolution with the fixed bilinear kernel of size
/// 2f - f%2 and symmetric crop, giving exactly factor*H x factor*W. Input
/// indices past the border are clamped, so constant maps stay constant.
template <class T>
BasicTensor<T> bilinear_upsample(const BasicTensor<T>& input, std::size_t factor);

/// The 1-D taps used by bilinear_upsample.
std::vector<double> bilinear_kernel(std::size_t factor);

/// Keeps the top-left h x w window.
template <class T>
BasicTensor<T> crop(const BasicTensor<T>& input, std::size_t h, std::size_t w);

template <class T>
BasicTensor<T> concat_channels(std::span<const BasicTensor<T>> inputs);

template <class T>
BasicTensor<T> slice_channels(const BasicTensor<T>& input, std::size_t begin, std::size_t count);

template <class T>
BasicTensor<T> add(const BasicTensor<T>& a, const BasicTensor<T>& b);

template <class T>
BasicTensor<T> mul(const BasicTensor<T>& a, const BasicTensor<T>& b);

template <class T>
BasicTensor<T> scale(const BasicTensor<T>& a, double factor);

/// Sum of all elements as a (1,1,1,1) tensor, accumulated in double.
template <class T>
BasicTensor<T> sum(const BasicTensor<T>& a);

}  // namespace msmsf
