#include "msmsf/image.hpp"

#include <algorithm>
#include <cmath>

#include "msmsf/errors.hpp"

namespace msmsf {

namespace {

struct Sample1D {
  std::size_t i0;
  std::size_t i1;
  double t;
};

std::vector<Sample1D> axis_samples(std::size_t in, std::size_t out) {
  std::vector<Sample1D> s(out);
  const double ratio = static_cast<double>(in) / static_cast<double>(out);
  for (std::size_t o = 0; o < out; ++o) {
    double src = (static_cast<double>(o) + 0.5) * ratio - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in - 1));
    const auto i0 = static_cast<std::size_t>(std::floor(src));
    const std::size_t i1 = std::min(i0 + 1, in - 1);
    s[o] = {i0, i1, src - static_cast<double>(i0)};
  }
  return s;
}

void resize_plane(const float* src, std::size_t h, std::size_t w, float* dst, std::size_t oh, std::size_t ow) {
  if (h == oh && w == ow) {
    std::copy(src, src + h * w, dst);
    return;
  }
  const auto rows = axis_samples(h, oh);
  const auto cols = axis_samples(w, ow);
  for (std::size_t y = 0; y < oh; ++y) {
    const auto& r = rows[y];
    for (std::size_t x = 0; x < ow; ++x) {
      const auto& c = cols[x];
      const double top = (1.0 - c.t) * src[r.i0 * w + c.i0] + c.t * src[r.i0 * w + c.i1];
      const double bottom = (1.0 - c.t) * src[r.i1 * w + c.i0] + c.t * src[r.i1 * w + c.i1];
      dst[y * ow + x] = static_cast<float>((1.0 - r.t) * top + r.t * bottom);
    }
  }
}

void check_target(std::size_t h, std::size_t w, std::size_t oh, std::size_t ow) {
  if (h == 0 || w == 0 || oh == 0 || ow == 0) {
    throw ConfigError("resize: extents must be positive");
  }
}

}  // namespace

Tensor to_tensor(const std::vector<const Image*>& batch) {
  if (batch.empty()) throw ConfigError("to_tensor: empty batch");
  const Image& first = *batch.front();
  Tensor t(Shape{batch.size(), first.c, first.h, first.w});
  for (std::size_t n = 0; n < batch.size(); ++n) {
    const Image& im = *batch[n];
    if (im.c != first.c || im.h != first.h || im.w != first.w) {
      throw ConfigError("to_tensor: batch images differ in size");
    }
    std::copy(im.data.begin(), im.data.end(), t.values().begin() + static_cast<long>(n * im.data.size()));
  }
  return t;
}

Tensor to_tensor(const Image& image) { return to_tensor(std::vector<const Image*>{&image}); }

Image resize_bilinear(const Image& image, std::size_t height, std::size_t width) {
  check_target(image.h, image.w, height, width);
  Image out(image.c, height, width);
  for (std::size_t ch = 0; ch < image.c; ++ch) {
    resize_plane(image.data.data() + ch * image.h * image.w, image.h, image.w, out.data.data() + ch * height * width,
                 height, width);
  }
  return out;
}

Plane<float> resize_bilinear(const Plane<float>& plane, std::size_t height, std::size_t width) {
  check_target(plane.h, plane.w, height, width);
  Plane<float> out(height, width);
  resize_plane(plane.data.data(), plane.h, plane.w, out.data.data(), height, width);
  return out;
}

}  // namespace msmsf
