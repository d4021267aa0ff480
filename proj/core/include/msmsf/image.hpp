#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "msmsf/tensor.hpp"

namespace msmsf {

/// Row-major single-channel raster.
template <class T>
struct Plane {
  std::size_t h = 0;
  std::size_t w = 0;
  std::vector<T> data;

  Plane() = default;
  Plane(std::size_t height, std::size_t width, T fill = T{}) : h(height), w(width), data(height * width, fill) {}

  T& at(std::size_t y, std::size_t x) { return data[y * w + x]; }
  const T& at(std::size_t y, std::size_t x) const { return data[y * w + x]; }
  std::size_t size() const { return data.size(); }
  bool same_size(const Plane& o) const { return h == o.h && w == o.w; }

  friend bool operator==(const Plane&, const Plane&) = default;
};

using BinaryMap = Plane<std::uint8_t>;

/// Planar (C, H, W) float image, values nominally in [0, 1].
struct Image {
  std::size_t c = 0;
  std::size_t h = 0;
  std::size_t w = 0;
  std::vector<float> data;

  Image() = default;
  Image(std::size_t channels, std::size_t height, std::size_t width, float fill = 0.0f)
      : c(channels), h(height), w(width), data(channels * height * width, fill) {}

  float& at(std::size_t ch, std::size_t y, std::size_t x) { return data[(ch * h + y) * w + x]; }
  float at(std::size_t ch, std::size_t y, std::size_t x) const { return data[(ch * h + y) * w + x]; }

  friend bool operator==(const Image&, const Image&) = default;
};

/// Stacks equally sized images into an (N, C, H, W) tensor.
Tensor to_tensor(const std::vector<const Image*>& batch);
Tensor to_tensor(const Image& image);

/// Bilinear resampling with half-pixel centers and edge clamping.
Image resize_bilinear(const Image& image, std::size_t height, std::size_t width);
Plane<float> resize_bilinear(const Plane<float>& plane, std::size_t height, std::size_t width);

}  // namespace msmsf
