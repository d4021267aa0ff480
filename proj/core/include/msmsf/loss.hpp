#pragma once

#include <array>
#include <span>

#include "msmsf/ground_truth.hpp"
#include "msmsf/model.hpp"
#include "msmsf/tensor.hpp"

namespace msmsf {

/// Weight on the negative term relative to (1 - lambda).
inline constexpr double kNegativeWeightScale = 1.1;

/// Class-balanced cross-entropy summed over a batch of (N, 1, H, W) logits:
///   -lambda * sum_{+} log sigmoid(a) - 1.1 (1 - lambda) * sum_{-} log(1 - sigmoid(a))
/// with lambda = |G-| / (|G+| + |G-|) per image. Ignored pixels contribute
/// nothing and receive zero gradient. Throws DataError for an image whose
/// pixels are all ignored.
template <class T>
BasicTensor<T> balanced_bce_loss(const BasicTensor<T>& logits, std::span<const TriStateGroundTruth> gts);

template <class T>
BasicTensor<T> balanced_bce_loss(const BasicTensor<T>& logits, const TriStateGroundTruth& gt) {
  return balanced_bce_loss(logits, std::span<const TriStateGroundTruth>(&gt, 1));
}

struct LossBreakdown {
  Tensor total;
  std::array<double, 3> sides{};
  double fused = 0.0;
};

/// sum_m beta_m * l_side^(m) + l_fuse.
LossBreakdown total_loss(const NetOutputs& outputs, std::span<const TriStateGroundTruth> gts,
                         const std::array<double, 3>& side_weights = {1.0, 1.0, 1.0});

}  // namespace msmsf
