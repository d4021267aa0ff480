#include "msmsf/inference.hpp"

#include <algorithm>
#include <cmath>

#include "msmsf/errors.hpp"
#include "msmsf/ops.hpp"

namespace msmsf {

namespace {

EdgeProbabilityMap to_map(const Tensor& logits) {
  const Tensor p = sigmoid(logits);
  EdgeProbabilityMap m;
  m.values = Plane<float>(p.shape().h, p.shape().w);
  std::copy(p.values().begin(), p.values().end(), m.values.data.begin());
  return m;
}

}  // namespace

Prediction predict_all(const MsmsfNet& net, const Image& image) {
  NoGradGuard no_grad;
  const NetOutputs out = net.forward(to_tensor(image));
  Prediction p;
  p.fused = to_map(out.fused);
  for (std::size_t m = 0; m < 3; ++m) p.sides[m] = to_map(out.sides[m]);
  return p;
}

EdgeProbabilityMap predict(const MsmsfNet& net, const Image& image) { return predict_all(net, image).fused; }

std::size_t scaled_extent(std::size_t extent, double scale, std::size_t minimum) {
  const auto scaled = static_cast<std::size_t>(std::floor(static_cast<double>(extent) * scale + 0.5));
  return std::max({scaled, minimum, std::size_t{1}});
}

EdgeProbabilityMap multiscale_predict(const MsmsfNet& net, const Image& image, const std::vector<double>& scales) {
  if (scales.empty()) throw ConfigError("multiscale_predict: no scales");
  for (const double s : scales) {
    if (!(s > 0.0)) throw ConfigError("multiscale_predict: scales must be positive");
  }
  std::vector<EdgeProbabilityMap> maps;
  const std::size_t minimum = net.config().min_input_extent();
  for (const double s : scales) {
    const std::size_t h = scaled_extent(image.h, s, minimum);
    const std::size_t w = scaled_extent(image.w, s, minimum);
    if (h == image.h && w == image.w) {
      maps.push_back(predict(net, image));
      continue;
    }
    const EdgeProbabilityMap scaled = predict(net, resize_bilinear(image, h, w));
    maps.push_back({resize_bilinear(scaled.values, image.h, image.w)});
  }
  return maps.size() == 1 ? maps.front() : average_maps(maps);
}

EdgeProbabilityMap average_maps(const std::vector<EdgeProbabilityMap>& maps) {
  if (maps.empty()) throw ConfigError("average_maps: nothing to average");
  EdgeProbabilityMap out;
  out.values = Plane<float>(maps.front().height(), maps.front().width());
  std::vector<double> acc(out.values.size(), 0.0);
  for (const auto& m : maps) {
    if (!m.values.same_size(out.values)) throw DataError("average_maps: map sizes differ");
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += m.values.data[i];
  }
  const double n = static_cast<double>(maps.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    out.values.data[i] = std::clamp(static_cast<float>(acc[i] / n), 0.0f, 1.0f);
  }
  return out;
}

EdgeProbabilityMap modality_average(const EdgeProbabilityMap& rgb, const EdgeProbabilityMap& hha) {
  if (!rgb.values.same_size(hha.values)) {
    throw DataError("modality_average: maps are " + std::to_string(rgb.height()) + "x" +
                    std::to_string(rgb.width()) + " and " + std::to_string(hha.height()) + "x" +
                    std::to_string(hha.width()));
  }
  return average_maps({rgb, hha});
}

}  // namespace msmsf
