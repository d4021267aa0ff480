#pragma once

#include <array>
#include <vector>

#include "msmsf/image.hpp"
#include "msmsf/model.hpp"

namespace msmsf {

/// Single-channel map of edge probabilities in [0, 1].
struct EdgeProbabilityMap {
  Plane<float> values;

  std::size_t height() const { return values.h; }
  std::size_t width() const { return values.w; }
  friend bool operator==(const EdgeProbabilityMap&, const EdgeProbabilityMap&) = default;
};

struct Prediction {
  EdgeProbabilityMap fused;
  std::array<EdgeProbabilityMap, 3> sides;
};

/// Sigmoid of all four logit maps; the fused map is the final output.
Prediction predict_all(const MsmsfNet& net, const Image& image);
EdgeProbabilityMap predict(const MsmsfNet& net, const Image& image);

/// Predicts at each scale (extents rounded half-up, at least the net's
/// downsampling footprint), resizes back bilinearly and averages in the
/// given order.
EdgeProbabilityMap multiscale_predict(const MsmsfNet& net, const Image& image,
                                      const std::vector<double>& scales = {0.5, 1.0, 1.5});

/// Pixelwise (a + b) / 2.
EdgeProbabilityMap modality_average(const EdgeProbabilityMap& rgb, const EdgeProbabilityMap& hha);

/// Pixelwise arithmetic mean in list order.
EdgeProbabilityMap average_maps(const std::vector<EdgeProbabilityMap>& maps);

std::size_t scaled_extent(std::size_t extent, double scale, std::size_t minimum);

}  // namespace msmsf
