#include "msmsf/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "msmsf/errors.hpp"

namespace msmsf {

namespace {

template <class T>
using NodePtr = std::shared_ptr<detail::TensorNode<T>>;

struct Tap {
  std::size_t index;
  double weight;
};

// Sparse 1-D interpolation matrix: taps[o] lists the input samples feeding output o.
std::vector<std::vector<Tap>> upsample_taps(std::size_t in, std::size_t factor) {
  const auto kernel = bilinear_kernel(factor);
  const auto k_size = static_cast<long>(kernel.size());
  const auto f = static_cast<long>(factor);
  const long pad = (k_size - f) / 2;
  const long n_in = static_cast<long>(in);
  std::vector<std::vector<Tap>> taps(in * factor);
  for (long o = 0; o < n_in * f; ++o) {
    const long hi = (o + pad) / f;
    for (long i = hi;; --i) {
      const long k = o + pad - i * f;
      if (k >= k_size) break;
      const long clamped = std::clamp<long>(i, 0, n_in - 1);
      taps[static_cast<std::size_t>(o)].push_back({static_cast<std::size_t>(clamped), kernel[k]});
    }
  }
  return taps;
}

void check_rank(const Shape& s, const char* what) {
  if (s.numel() == 0) {
    throw ConfigError(std::string(what) + ": empty tensor " + s.str());
  }
}

}  // namespace

std::size_t conv_output_extent(std::size_t in, std::size_t pad, std::size_t kernel, std::size_t stride) {
  if (stride == 0) {
    throw ConfigError("stride must be positive");
  }
  if (in + 2 * pad < kernel) {
    throw ConfigError("padded extent " + std::to_string(in + 2 * pad) + " smaller than kernel " +
                      std::to_string(kernel));
  }
  return (in + 2 * pad - kernel) / stride + 1;
}

std::vector<double> bilinear_kernel(std::size_t factor) {
  if (factor == 0) {
    throw ConfigError("upsampling factor must be >= 1");
  }
  const std::size_t size = 2 * factor - factor % 2;
  const double center = factor % 2 == 1 ? static_cast<double>(factor) - 1.0 : static_cast<double>(factor) - 0.5;
  std::vector<double> kernel(size);
  for (std::size_t i = 0; i < size; ++i) {
    kernel[i] = 1.0 - std::abs(static_cast<double>(i) - center) / static_cast<double>(factor);
  }
  return kernel;
}

// ---------------------------------------------------------------------------
// conv2d

template <class T>
BasicTensor<T> conv2d(const BasicTensor<T>& input, const BasicConvParams<T>& params) {
  const Shape& is = input.shape();
  const Shape& ws = params.weight.shape();
  check_rank(is, "conv2d input");
  if (ws.c != is.c || ws.n == 0) {
    throw ConfigError("conv2d: input " + is.str() + " incompatible with weight " + ws.str());
  }
  const bool has_bias = !params.bias.empty();
  if (has_bias && params.bias.numel() != ws.n) {
    throw ConfigError("conv2d: bias " + params.bias.shape().str() + " does not match weight " + ws.str());
  }
  const Size2 stride = params.stride;
  const Size2 pad = params.padding;
  const std::size_t out_h = conv_output_extent(is.h, pad.h, ws.h, stride.h);
  const std::size_t out_w = conv_output_extent(is.w, pad.w, ws.w, stride.w);
  const Shape os{is.n, ws.n, out_h, out_w};

  // Valid output column range [lo, hi) for kernel column kx.
  auto col_range = [=](std::size_t kx) {
    const long p = static_cast<long>(pad.w);
    const long s = static_cast<long>(stride.w);
    const long k = static_cast<long>(kx);
    long lo = p - k > 0 ? (p - k + s - 1) / s : 0;
    long hi = (static_cast<long>(is.w) - 1 + p - k);
    hi = hi < 0 ? 0 : hi / s + 1;
    hi = std::min<long>(hi, static_cast<long>(out_w));
    lo = std::min(lo, hi);
    return std::pair<std::size_t, std::size_t>(static_cast<std::size_t>(lo), static_cast<std::size_t>(hi));
  };

  std::vector<T> out(os.numel());
  const auto x = input.values();
  const auto wt = params.weight.values();
  for (std::size_t n = 0; n < is.n; ++n) {
    for (std::size_t oc = 0; oc < ws.n; ++oc) {
      T* out_plane = out.data() + os.offset(n, oc, 0, 0);
      std::fill(out_plane, out_plane + os.plane(), has_bias ? params.bias.values()[oc] : T{0});
      for (std::size_t ic = 0; ic < is.c; ++ic) {
        const T* in_plane = x.data() + is.offset(n, ic, 0, 0);
        for (std::size_t ky = 0; ky < ws.h; ++ky) {
          for (std::size_t kx = 0; kx < ws.w; ++kx) {
            const T weight = wt[ws.offset(oc, ic, ky, kx)];
            const auto [lo, hi] = col_range(kx);
            for (std::size_t oy = 0; oy < out_h; ++oy) {
              const long iy = static_cast<long>(oy * stride.h + ky) - static_cast<long>(pad.h);
              if (iy < 0 || iy >= static_cast<long>(is.h)) continue;
              T* orow = out_plane + oy * out_w;
              const T* irow = in_plane + static_cast<std::size_t>(iy) * is.w;
              if (stride.w == 1) {
                const T* src = irow + (lo + kx - pad.w);
                T* dst = orow + lo;
                for (std::size_t j = 0; j < hi - lo; ++j) dst[j] += weight * src[j];
              } else {
                for (std::size_t ox = lo; ox < hi; ++ox) orow[ox] += weight * irow[ox * stride.w + kx - pad.w];
              }
            }
          }
        }
      }
    }
  }

  std::vector<NodePtr<T>> parents{input.node(), params.weight.node()};
  if (has_bias) parents.push_back(params.bias.node());
  return detail::make_result<T>(
      os, std::move(out), std::move(parents),
      [is, ws, os, stride, pad, has_bias, col_range](detail::TensorNode<T>& self) {
        auto& in_node = *self.parents[0];
        auto& w_node = *self.parents[1];
        const T* gout = self.grad.data();
        const T* x = in_node.values.data();
        const T* wt = w_node.values.data();
        T* gin = in_node.requires_grad ? detail::grad_buffer(in_node).data() : nullptr;
        T* gw = w_node.requires_grad ? detail::grad_buffer(w_node).data() : nullptr;
        if (has_bias && self.parents[2]->requires_grad) {
          auto& gb = detail::grad_buffer(*self.parents[2]);
          for (std::size_t oc = 0; oc < os.c; ++oc) {
            double acc = 0.0;
            for (std::size_t n = 0; n < os.n; ++n) {
              const T* g = gout + os.offset(n, oc, 0, 0);
              for (std::size_t i = 0; i < os.plane(); ++i) acc += g[i];
            }
            gb[oc] += static_cast<T>(acc);
          }
        }
        for (std::size_t oc = 0; oc < ws.n; ++oc) {
          for (std::size_t ic = 0; ic < is.c; ++ic) {
            for (std::size_t ky = 0; ky < ws.h; ++ky) {
              for (std::size_t kx = 0; kx < ws.w; ++kx) {
                const std::size_t widx = ws.offset(oc, ic, ky, kx);
                const T weight = wt[widx];
                const auto [lo, hi] = col_range(kx);
                double wacc = 0.0;
                for (std::size_t n = 0; n < is.n; ++n) {
                  const T* gplane = gout + os.offset(n, oc, 0, 0);
                  const std::size_t ioff = is.offset(n, ic, 0, 0);
                  for (std::size_t oy = 0; oy < os.h; ++oy) {
                    const long iy = static_cast<long>(oy * stride.h + ky) - static_cast<long>(pad.h);
                    if (iy < 0 || iy >= static_cast<long>(is.h)) continue;
                    const T* grow = gplane + oy * os.w;
                    const std::size_t roff = ioff + static_cast<std::size_t>(iy) * is.w;
                    if (stride.w == 1) {
                      const std::size_t shift = roff + lo + kx - pad.w;
                      const T* g = grow + lo;
                      if (gin) {
                        T* dst = gin + shift;
                        for (std::size_t j = 0; j < hi - lo; ++j) dst[j] += weight * g[j];
                      }
                      if (gw) {
                        const T* src = x + shift;
                        T racc{0};
                        for (std::size_t j = 0; j < hi - lo; ++j) racc += g[j] * src[j];
                        wacc += racc;
                      }
                    } else {
                      for (std::size_t ox = lo; ox < hi; ++ox) {
                        const std::size_t ii = roff + ox * stride.w + kx - pad.w;
                        if (gin) gin[ii] += weight * grow[ox];
                        if (gw) wacc += grow[ox] * x[ii];
                      }
                    }
                  }
                }
                if (gw) gw[widx] += static_cast<T>(wacc);
              }
            }
          }
        }
      });
}

// ---------------------------------------------------------------------------
// maxpool2d

template <class T>
BasicTensor<T> maxpool2d(const BasicTensor<T>& input, std::size_t kernel, std::size_t stride, std::size_t padding) {
  const Shape& is = input.shape();
  check_rank(is, "maxpool2d input");
  if (kernel == 0) throw ConfigError("maxpool2d: kernel must be positive");
  if (padding >= kernel) throw ConfigError("maxpool2d: padding must be smaller than kernel");
  const Shape os{is.n, is.c, conv_output_extent(is.h, padding, kernel, stride),
                 conv_output_extent(is.w, padding, kernel, stride)};
  std::vector<T> out(os.numel());
  auto argmax = std::make_shared<std::vector<std::size_t>>(os.numel());
  const auto x = input.values();
  for (std::size_t nc = 0; nc < is.n * is.c; ++nc) {
    const std::size_t in_base = nc * is.plane();
    const std::size_t out_base = nc * os.plane();
    for (std::size_t oy = 0; oy < os.h; ++oy) {
      for (std::size_t ox = 0; ox < os.w; ++ox) {
        T best = -std::numeric_limits<T>::infinity();
        std::size_t best_idx = 0;
        bool found = false;
        for (std::size_t ky = 0; ky < kernel; ++ky) {
          const long iy = static_cast<long>(oy * stride + ky) - static_cast<long>(padding);
          if (iy < 0 || iy >= static_cast<long>(is.h)) continue;
          for (std::size_t kx = 0; kx < kernel; ++kx) {
            const long ix = static_cast<long>(ox * stride + kx) - static_cast<long>(padding);
            if (ix < 0 || ix >= static_cast<long>(is.w)) continue;
            const std::size_t idx = in_base + static_cast<std::size_t>(iy) * is.w + static_cast<std::size_t>(ix);
            if (!found || x[idx] > best) {
              best = x[idx];
              best_idx = idx;
              found = true;
            }
          }
        }
        out[out_base + oy * os.w + ox] = best;
        (*argmax)[out_base + oy * os.w + ox] = best_idx;
      }
    }
  }
  return detail::make_result<T>(os, std::move(out), {input.node()}, [argmax](detail::TensorNode<T>& self) {
    auto& gin = detail::grad_buffer(*self.parents[0]);
    for (std::size_t i = 0; i < self.grad.size(); ++i) gin[(*argmax)[i]] += self.grad[i];
  });
}

// ---------------------------------------------------------------------------
// elementwise

template <class T>
BasicTensor<T> relu(const BasicTensor<T>& input) {
  const auto x = input.values();
  std::vector<T> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] > T{0} ? x[i] : T{0};
  return detail::make_result<T>(input.shape(), std::move(out), {input.node()}, [](detail::TensorNode<T>& self) {
    auto& parent = *self.parents[0];
    auto& gin = detail::grad_buffer(parent);
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      if (parent.values[i] > T{0}) gin[i] += self.grad[i];
    }
  });
}

template <class T>
BasicTensor<T> sigmoid(const BasicTensor<T>& input) {
  const auto x = input.values();
  std::vector<T> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= T{0}) {
      out[i] = T{1} / (T{1} + std::exp(-x[i]));
    } else {
      const T e = std::exp(x[i]);
      out[i] = e / (T{1} + e);
    }
  }
  return detail::make_result<T>(input.shape(), std::move(out), {input.node()}, [](detail::TensorNode<T>& self) {
    auto& gin = detail::grad_buffer(*self.parents[0]);
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      const T s = self.values[i];
      gin[i] += self.grad[i] * s * (T{1} - s);
    }
  });
}

template <class T>
BasicTensor<T> add(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  if (!(a.shape() == b.shape())) {
    throw ConfigError("add: shape mismatch " + a.shape().str() + " vs " + b.shape().str());
  }
  std::vector<T> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] + b.values()[i];
  return detail::make_result<T>(a.shape(), std::move(out), {a.node(), b.node()}, [](detail::TensorNode<T>& self) {
    for (auto& parent : self.parents) {
      if (!parent->requires_grad) continue;
      auto& g = detail::grad_buffer(*parent);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

template <class T>
BasicTensor<T> mul(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  if (!(a.shape() == b.shape())) {
    throw ConfigError("mul: shape mismatch " + a.shape().str() + " vs " + b.shape().str());
  }
  std::vector<T> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] * b.values()[i];
  return detail::make_result<T>(a.shape(), std::move(out), {a.node(), b.node()}, [](detail::TensorNode<T>& self) {
    auto& pa = *self.parents[0];
    auto& pb = *self.parents[1];
    // Read both operands before writing so mul(x, x) accumulates 2x.
    if (pa.requires_grad) {
      auto& g = detail::grad_buffer(pa);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pb.values[i];
    }
    if (pb.requires_grad) {
      auto& g = detail::grad_buffer(pb);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pa.values[i];
    }
  });
}

template <class T>
BasicTensor<T> scale(const BasicTensor<T>& a, double factor) {
  std::vector<T> out(a.numel());
  const T f = static_cast<T>(factor);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] * f;
  return detail::make_result<T>(a.shape(), std::move(out), {a.node()}, [f](detail::TensorNode<T>& self) {
    auto& g = detail::grad_buffer(*self.parents[0]);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * f;
  });
}

template <class T>
BasicTensor<T> sum(const BasicTensor<T>& a) {
  double acc = 0.0;
  for (const T v : a.values()) acc += v;
  return detail::make_result<T>(Shape{1, 1, 1, 1}, {static_cast<T>(acc)}, {a.node()},
                                [](detail::TensorNode<T>& self) {
                                  auto& g = detail::grad_buffer(*self.parents[0]);
                                  for (auto& v : g) v += self.grad[0];
                                });
}

// ---------------------------------------------------------------------------
// resampling and layout

template <class T>
BasicTensor<T> bilinear_upsample(const BasicTensor<T>& input, std::size_t factor) {
  if (factor == 0) throw ConfigError("bilinear_upsample: factor must be >= 1");
  const Shape& is = input.shape();
  check_rank(is, "bilinear_upsample input");
  if (factor == 1) {
    std::vector<T> out(input.values().begin(), input.values().end());
    return detail::make_result<T>(is, std::move(out), {input.node()}, [](detail::TensorNode<T>& self) {
      auto& g = detail::grad_buffer(*self.parents[0]);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    });
  }
  const Shape os{is.n, is.c, is.h * factor, is.w * factor};
  auto rows = std::make_shared<std::vector<std::vector<Tap>>>(upsample_taps(is.h, factor));
  auto cols = std::make_shared<std::vector<std::vector<Tap>>>(upsample_taps(is.w, factor));

  std::vector<T> out(os.numel());
  std::vector<double> tmp(is.h * os.w);
  const auto x = input.values();
  for (std::size_t nc = 0; nc < is.n * is.c; ++nc) {
    const T* src = x.data() + nc * is.plane();
    for (std::size_t y = 0; y < is.h; ++y) {
      for (std::size_t ox = 0; ox < os.w; ++ox) {
        double acc = 0.0;
        for (const Tap& t : (*cols)[ox]) acc += t.weight * src[y * is.w + t.index];
        tmp[y * os.w + ox] = acc;
      }
    }
    T* dst = out.data() + nc * os.plane();
    for (std::size_t oy = 0; oy < os.h; ++oy) {
      for (std::size_t ox = 0; ox < os.w; ++ox) {
        double acc = 0.0;
        for (const Tap& t : (*rows)[oy]) acc += t.weight * tmp[t.index * os.w + ox];
        dst[oy * os.w + ox] = static_cast<T>(acc);
      }
    }
  }
  return detail::make_result<T>(os, std::move(out), {input.node()}, [is, os, rows, cols](detail::TensorNode<T>& self) {
    auto& gin = detail::grad_buffer(*self.parents[0]);
    std::vector<double> tmp(is.h * os.w);
    for (std::size_t nc = 0; nc < is.n * is.c; ++nc) {
      std::fill(tmp.begin(), tmp.end(), 0.0);
      const T* g = self.grad.data() + nc * os.plane();
      for (std::size_t oy = 0; oy < os.h; ++oy) {
        for (const Tap& t : (*rows)[oy]) {
          for (std::size_t ox = 0; ox < os.w; ++ox) tmp[t.index * os.w + ox] += t.weight * g[oy * os.w + ox];
        }
      }
      T* dst = gin.data() + nc * is.plane();
      for (std::size_t y = 0; y < is.h; ++y) {
        for (std::size_t ox = 0; ox < os.w; ++ox) {
          for (const Tap& t : (*cols)[ox]) dst[y * is.w + t.index] += static_cast<T>(t.weight * tmp[y * os.w + ox]);
        }
      }
    }
  });
}

template <class T>
BasicTensor<T> crop(const BasicTensor<T>& input, std::size_t h, std::size_t w) {
  const Shape& is = input.shape();
  if (h == 0 || w == 0 || h > is.h || w > is.w) {
    throw ConfigError("crop: " + std::to_string(h) + "x" + std::to_string(w) + " outside " + is.str());
  }
  const Shape os{is.n, is.c, h, w};
  std::vector<T> out(os.numel());
  for (std::size_t nc = 0; nc < is.n * is.c; ++nc) {
    for (std::size_t y = 0; y < h; ++y) {
      const auto src = input.values().begin() + static_cast<long>(nc * is.plane() + y * is.w);
      std::copy(src, src + static_cast<long>(w), out.begin() + static_cast<long>(nc * os.plane() + y * w));
    }
  }
  return detail::make_result<T>(os, std::move(out), {input.node()}, [is, os](detail::TensorNode<T>& self) {
    auto& g = detail::grad_buffer(*self.parents[0]);
    for (std::size_t nc = 0; nc < is.n * is.c; ++nc) {
      for (std::size_t y = 0; y < os.h; ++y) {
        for (std::size_t x = 0; x < os.w; ++x) g[nc * is.plane() + y * is.w + x] += self.grad[nc * os.plane() + y * os.w + x];
      }
    }
  });
}

template <class T>
BasicTensor<T> concat_channels(std::span<const BasicTensor<T>> inputs) {
  if (inputs.empty()) throw ConfigError("concat_channels: no inputs");
  const Shape& first = inputs.front().shape();
  std::size_t channels = 0;
  for (const auto& t : inputs) {
    const Shape& s = t.shape();
    if (s.n != first.n || s.h != first.h || s.w != first.w) {
      throw ConfigError("concat_channels: " + s.str() + " does not match " + first.str());
    }
    channels += s.c;
  }
  const Shape os{first.n, channels, first.h, first.w};
  std::vector<T> out(os.numel());
  std::vector<NodePtr<T>> parents;
  std::size_t c0 = 0;
  for (const auto& t : inputs) {
    const Shape& s = t.shape();
    for (std::size_t n = 0; n < s.n; ++n) {
      const auto src = t.values().begin() + static_cast<long>(s.offset(n, 0, 0, 0));
      std::copy(src, src + static_cast<long>(s.c * s.plane()), out.begin() + static_cast<long>(os.offset(n, c0, 0, 0)));
    }
    c0 += s.c;
    parents.push_back(t.node());
  }
  return detail::make_result<T>(os, std::move(out), std::move(parents), [os](detail::TensorNode<T>& self) {
    std::size_t c0 = 0;
    for (auto& parent : self.parents) {
      const Shape& s = parent->shape;
      if (parent->requires_grad) {
        auto& g = detail::grad_buffer(*parent);
        for (std::size_t n = 0; n < s.n; ++n) {
          const T* src = self.grad.data() + os.offset(n, c0, 0, 0);
          T* dst = g.data() + s.offset(n, 0, 0, 0);
          for (std::size_t i = 0; i < s.c * s.plane(); ++i) dst[i] += src[i];
        }
      }
      c0 += s.c;
    }
  });
}

template <class T>
BasicTensor<T> slice_channels(const BasicTensor<T>& input, std::size_t begin, std::size_t count) {
  const Shape& is = input.shape();
  if (count == 0 || begin + count > is.c) {
    throw ConfigError("slice_channels: [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                      ") outside " + is.str());
  }
  const Shape os{is.n, count, is.h, is.w};
  std::vector<T> out(os.numel());
  for (std::size_t n = 0; n < is.n; ++n) {
    const auto src = input.values().begin() + static_cast<long>(is.offset(n, begin, 0, 0));
    std::copy(src, src + static_cast<long>(count * is.plane()), out.begin() + static_cast<long>(os.offset(n, 0, 0, 0)));
  }
  return detail::make_result<T>(os, std::move(out), {input.node()}, [is, os, begin](detail::TensorNode<T>& self) {
    auto& g = detail::grad_buffer(*self.parents[0]);
    for (std::size_t n = 0; n < is.n; ++n) {
      const T* src = self.grad.data() + os.offset(n, 0, 0, 0);
      T* dst = g.data() + is.offset(n, begin, 0, 0);
      for (std::size_t i = 0; i < os.c * os.plane(); ++i) dst[i] += src[i];
    }
  });
}

#define MSMSF_INSTANTIATE_OPS(T)                                                                  \
  template BasicTensor<T> conv2d(const BasicTensor<T>&, const BasicConvParams<T>&);               \
  template BasicTensor<T> maxpool2d(const BasicTensor<T>&, std::size_t, std::size_t, std::size_t); \
  template BasicTensor<T> relu(const BasicTensor<T>&);                                            \
  template BasicTensor<T> sigmoid(const BasicTensor<T>&);                                         \
  template BasicTensor<T> bilinear_upsample(const BasicTensor<T>&, std::size_t);                  \
  template BasicTensor<T> crop(const BasicTensor<T>&, std::size_t, std::size_t);                  \
  template BasicTensor<T> concat_channels(std::span<const BasicTensor<T>>);                       \
  template BasicTensor<T> slice_channels(const BasicTensor<T>&, std::size_t, std::size_t);        \
  template BasicTensor<T> add(const BasicTensor<T>&, const BasicTensor<T>&);                      \
  template BasicTensor<T> mul(const BasicTensor<T>&, const BasicTensor<T>&);                      \
  template BasicTensor<T> scale(const BasicTensor<T>&, double);                                   \
  template BasicTensor<T> sum(const BasicTensor<T>&);

MSMSF_INSTANTIATE_OPS(float)
MSMSF_INSTANTIATE_OPS(double)

#undef MSMSF_INSTANTIATE_OPS

}  // namespace msmsf
