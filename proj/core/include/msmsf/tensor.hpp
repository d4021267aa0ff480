#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace msmsf {

/// Extents of a rank-4 (batch, channel, height, width) array, width fastest.
struct Shape {
  std::size_t n = 0;
  std::size_t c = 0;
  std::size_t h = 0;
  std::size_t w = 0;

  std::size_t numel() const { return n * c * h * w; }
  std::size_t plane() const { return h * w; }
  std::size_t offset(std::size_t in, std::size_t ic, std::size_t iy, std::size_t ix) const {
    return ((in * c + ic) * h + iy) * w + ix;
  }
  std::string str() const;

  friend bool operator==(const Shape&, const Shape&) = default;
};

namespace detail {

template <class T>
struct TensorNode {
  Shape shape;
  std::vector<T> values;
  std::vector<T> grad;
  bool requires_grad = false;
  // Set only on op results; leaves have neither.
  std::vector<std::shared_ptr<TensorNode>> parents;
  std::function<void(TensorNode&)> backward_fn;
};

}  // namespace detail

/// Reference-counted handle to a rank-4 array with an optional gradient.
///
/// Copies share storage (like a framework tensor handle); use clone() for a
/// deep copy. Results of ops on tensors that require grad record the edges
/// needed by backward().
template <class T>
class BasicTensor {
 public:
  using value_type = T;
  using Node = detail::TensorNode<T>;

  BasicTensor();
  explicit BasicTensor(Shape shape, T fill = T{0});
  BasicTensor(Shape shape, std::vector<T> values);

  static BasicTensor scalar(T value);

  const Shape& shape() const { return node_->shape; }
  std::size_t numel() const { return node_->values.size(); }
  bool empty() const { return node_->values.empty(); }

  std::span<T> values() { return node_->values; }
  std::span<const T> values() const { return node_->values; }

  T& at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) {
    return node_->values[node_->shape.offset(n, c, y, x)];
  }
  T at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const {
    return node_->values[node_->shape.offset(n, c, y, x)];
  }

  /// Value of a single-element tensor.
  T item() const;

  bool requires_grad() const { return node_->requires_grad; }
  BasicTensor& set_requires_grad(bool on = true);

  bool has_grad() const { return !node_->grad.empty(); }
  std::span<const T> grad() const { return node_->grad; }
  std::span<T> mutable_grad();
  void zero_grad();

  bool is_leaf() const { return !node_->backward_fn; }

  BasicTensor clone() const;
  /// Same values, no history, no grad requirement.
  BasicTensor detach() const;

  /// Reverse-mode accumulation from a single-element root into every
  /// reachable tensor that requires grad. Gradients accumulate across calls.
  void backward() const;

  const std::shared_ptr<Node>& node() const { return node_; }
  explicit BasicTensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<Node> node_;
};

using Tensor = BasicTensor<float>;
using Tensor64 = BasicTensor<double>;

/// True unless a NoGradGuard is alive on this thread.
bool grad_enabled();

class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

namespace detail {

/// Builds an op result. History is attached only when grad mode is on and
/// some parent requires grad.
template <class T>
BasicTensor<T> make_result(Shape shape, std::vector<T> values,
                           std::vector<std::shared_ptr<TensorNode<T>>> parents,
                           std::function<void(TensorNode<T>&)> backward_fn);

/// Returns the parent's grad buffer, allocating zeros on first use.
template <class T>
std::vector<T>& grad_buffer(TensorNode<T>& node);

}  // namespace detail

template <class To, class From>
BasicTensor<To> cast(const BasicTensor<From>& t) {
  std::vector<To> out(t.values().begin(), t.values().end());
  return BasicTensor<To>(t.shape(), std::move(out));
}

}  // namespace msmsf
