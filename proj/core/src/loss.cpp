#include "msmsf/loss.hpp"

#include <cmath>

#include "msmsf/errors.hpp"
#include "msmsf/ops.hpp"

namespace msmsf {

namespace {

// log(1 + e^x) without overflow.
double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

template <class T>
BasicTensor<T> balanced_bce_loss(const BasicTensor<T>& logits, std::span<const TriStateGroundTruth> gts) {
  const Shape& s = logits.shape();
  if (s.c != 1 || s.n != gts.size()) {
    throw ConfigError("balanced_bce_loss: logits " + s.str() + " vs " + std::to_string(gts.size()) +
                      " ground-truth maps");
  }
  std::vector<double> pos_weight(s.n);
  std::vector<double> neg_weight(s.n);
  for (std::size_t n = 0; n < s.n; ++n) {
    const auto& gt = gts[n];
    if (gt.height() != s.h || gt.width() != s.w) {
      throw ConfigError("balanced_bce_loss: ground truth " + std::to_string(gt.height()) + "x" +
                        std::to_string(gt.width()) + " vs logits " + s.str());
    }
    const ClassCounts c = gt.counts();
    if (c.labeled() == 0) throw DataError("degenerate sample: every pixel is ignored");
    const double lambda = c.lambda();
    pos_weight[n] = lambda;
    neg_weight[n] = kNegativeWeightScale * (1.0 - lambda);
  }

  const auto a = logits.values();
  double loss = 0.0;
  for (std::size_t n = 0; n < s.n; ++n) {
    const auto& labels = gts[n].labels.data;
    const T* an = a.data() + n * s.plane();
    for (std::size_t i = 0; i < s.plane(); ++i) {
      const double x = an[i];
      if (labels[i] == Label::positive) {
        loss += pos_weight[n] * softplus(-x);
      } else if (labels[i] == Label::negative) {
        loss += neg_weight[n] * softplus(x);
      }
    }
  }

  // Labels are copied into the closure so the graph outlives the caller's spans.
  std::vector<Label> labels;
  labels.reserve(s.numel());
  for (const auto& gt : gts) labels.insert(labels.end(), gt.labels.data.begin(), gt.labels.data.end());
  return detail::make_result<T>(
      Shape{1, 1, 1, 1}, {static_cast<T>(loss)}, {logits.node()},
      [s, labels = std::move(labels), pos_weight, neg_weight](detail::TensorNode<T>& self) {
        auto& parent = *self.parents[0];
        auto& g = detail::grad_buffer(parent);
        const double upstream = self.grad[0];
        for (std::size_t n = 0; n < s.n; ++n) {
          for (std::size_t i = 0; i < s.plane(); ++i) {
            const std::size_t j = n * s.plane() + i;
            const double p = stable_sigmoid(parent.values[j]);
            if (labels[j] == Label::positive) {
              g[j] += static_cast<T>(upstream * -pos_weight[n] * (1.0 - p));
            } else if (labels[j] == Label::negative) {
              g[j] += static_cast<T>(upstream * neg_weight[n] * p);
            }
          }
        }
      });
}

template BasicTensor<float> balanced_bce_loss(const BasicTensor<float>&, std::span<const TriStateGroundTruth>);
template BasicTensor<double> balanced_bce_loss(const BasicTensor<double>&, std::span<const TriStateGroundTruth>);

LossBreakdown total_loss(const NetOutputs& outputs, std::span<const TriStateGroundTruth> gts,
                         const std::array<double, 3>& side_weights) {
  LossBreakdown out;
  Tensor fused = balanced_bce_loss(outputs.fused, gts);
  out.fused = fused.item();
  Tensor total = fused;
  for (std::size_t m = 0; m < 3; ++m) {
    if (side_weights[m] <= 0.0) throw ConfigError("side loss weights must be positive");
    Tensor side = balanced_bce_loss(outputs.sides[m], gts);
    out.sides[m] = side.item();
    total = add(total, scale(side, side_weights[m]));
  }
  out.total = total;
  return out;
}

}  // namespace msmsf
