#include "msmsf/tensor.hpp"

#include <algorithm>
#include <unordered_set>

#include "msmsf/errors.hpp"

namespace msmsf {

std::string Shape::str() const {
  return "(" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," +
         std::to_string(w) + ")";
}

namespace {
thread_local bool g_grad_enabled = true;
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

template <class T>
BasicTensor<T>::BasicTensor() : node_(std::make_shared<Node>()) {}

template <class T>
BasicTensor<T>::BasicTensor(Shape shape, T fill) : node_(std::make_shared<Node>()) {
  node_->shape = shape;
  node_->values.assign(shape.numel(), fill);
}

template <class T>
BasicTensor<T>::BasicTensor(Shape shape, std::vector<T> values) : node_(std::make_shared<Node>()) {
  if (values.size() != shape.numel()) {
    throw ConfigError("tensor " + shape.str() + " needs " + std::to_string(shape.numel()) +
                      " values, got " + std::to_string(values.size()));
  }
  node_->shape = shape;
  node_->values = std::move(values);
}

template <class T>
BasicTensor<T> BasicTensor<T>::scalar(T value) {
  return BasicTensor(Shape{1, 1, 1, 1}, std::vector<T>{value});
}

template <class T>
T BasicTensor<T>::item() const {
  if (numel() != 1) {
    throw ConfigError("item() on tensor of shape " + shape().str());
  }
  return node_->values[0];
}

template <class T>
BasicTensor<T>& BasicTensor<T>::set_requires_grad(bool on) {
  node_->requires_grad = on;
  return *this;
}

template <class T>
std::span<T> BasicTensor<T>::mutable_grad() {
  return detail::grad_buffer(*node_);
}

template <class T>
void BasicTensor<T>::zero_grad() {
  std::fill(node_->grad.begin(), node_->grad.end(), T{0});
}

template <class T>
BasicTensor<T> BasicTensor<T>::clone() const {
  BasicTensor out(shape(), node_->values);
  out.node_->requires_grad = node_->requires_grad;
  return out;
}

template <class T>
BasicTensor<T> BasicTensor<T>::detach() const {
  return BasicTensor(shape(), node_->values);
}

template <class T>
void BasicTensor<T>::backward() const {
  if (numel() != 1) {
    throw ConfigError("backward() requires a scalar root, got shape " + shape().str());
  }
  if (!node_->requires_grad) {
    return;
  }

  // Iterative post-order DFS gives a topological order (parents before children).
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack{{node_.get(), 0}};
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  detail::grad_buffer(*node_)[0] += T{1};
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->backward_fn && !node->grad.empty()) {
      node->backward_fn(*node);
    }
  }
}

namespace detail {

template <class T>
BasicTensor<T> make_result(Shape shape, std::vector<T> values,
                           std::vector<std::shared_ptr<TensorNode<T>>> parents,
                           std::function<void(TensorNode<T>&)> backward_fn) {
  BasicTensor<T> out(shape, std::move(values));
  const bool track = grad_enabled() && std::any_of(parents.begin(), parents.end(), [](const auto& p) {
                       return p->requires_grad;
                     });
  if (track) {
    auto& node = *out.node();
    node.requires_grad = true;
    node.parents = std::move(parents);
    node.backward_fn = std::move(backward_fn);
  }
  return out;
}

template <class T>
std::vector<T>& grad_buffer(TensorNode<T>& node) {
  if (node.grad.size() != node.values.size()) {
    node.grad.assign(node.values.size(), T{0});
  }
  return node.grad;
}

template BasicTensor<float> make_result(Shape, std::vector<float>,
                                        std::vector<std::shared_ptr<TensorNode<float>>>,
                                        std::function<void(TensorNode<float>&)>);
template BasicTensor<double> make_result(Shape, std::vector<double>,
                                         std::vector<std::shared_ptr<TensorNode<double>>>,
                                         std::function<void(TensorNode<double>&)>);
template std::vector<float>& grad_buffer(TensorNode<float>&);
template std::vector<double>& grad_buffer(TensorNode<double>&);

}  // namespace detail

template class BasicTensor<float>;
template class BasicTensor<double>;

}  // namespace msmsf
