#include "msmsf/augment.hpp"

#include <random>

#include "msmsf/errors.hpp"

namespace msmsf {

namespace {

// Maps an output coordinate of a CCW quarter-turn rotation to its source.
template <class Get, class Set>
void rotate_into(std::size_t h, std::size_t w, int turns, Get get, Set set) {
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      switch (turns) {
        case 1: set(w - 1 - x, y, get(y, x)); break;
        case 2: set(h - 1 - y, w - 1 - x, get(y, x)); break;
        case 3: set(x, h - 1 - y, get(y, x)); break;
        default: set(y, x, get(y, x)); break;
      }
    }
  }
}

int normalize_turns(int turns) { return ((turns % 4) + 4) % 4; }

}  // namespace

AugmentPolicy AugmentPolicy::flip_rotate() {
  AugmentPolicy p;
  p.id = "flip-rotate";
  p.horizontal_flip = true;
  p.rotations = true;
  return p;
}

AugmentPolicy AugmentPolicy::from_id(const std::string& id) {
  if (id == "identity") return identity();
  if (id == "flip-rotate") return flip_rotate();
  throw ConfigError("unknown augmentation policy '" + id + "' (expected identity or flip-rotate)");
}

Image flip_horizontal(const Image& image) {
  Image out(image.c, image.h, image.w);
  for (std::size_t c = 0; c < image.c; ++c)
    for (std::size_t y = 0; y < image.h; ++y)
      for (std::size_t x = 0; x < image.w; ++x) out.at(c, y, image.w - 1 - x) = image.at(c, y, x);
  return out;
}

TriStateGroundTruth flip_horizontal(const TriStateGroundTruth& gt) {
  TriStateGroundTruth out(gt.height(), gt.width());
  for (std::size_t y = 0; y < gt.height(); ++y)
    for (std::size_t x = 0; x < gt.width(); ++x) out.labels.at(y, gt.width() - 1 - x) = gt.labels.at(y, x);
  return out;
}

Image rotate90(const Image& image, int quarter_turns) {
  const int t = normalize_turns(quarter_turns);
  const bool swap = t % 2 == 1;
  Image out(image.c, swap ? image.w : image.h, swap ? image.h : image.w);
  for (std::size_t c = 0; c < image.c; ++c) {
    rotate_into(
        image.h, image.w, t, [&](std::size_t y, std::size_t x) { return image.at(c, y, x); },
        [&](std::size_t y, std::size_t x, float v) { out.at(c, y, x) = v; });
  }
  return out;
}

TriStateGroundTruth rotate90(const TriStateGroundTruth& gt, int quarter_turns) {
  const int t = normalize_turns(quarter_turns);
  const bool swap = t % 2 == 1;
  TriStateGroundTruth out(swap ? gt.width() : gt.height(), swap ? gt.height() : gt.width());
  rotate_into(
      gt.height(), gt.width(), t, [&](std::size_t y, std::size_t x) { return gt.labels.at(y, x); },
      [&](std::size_t y, std::size_t x, Label v) { out.labels.at(y, x) = v; });
  return out;
}

Image crop(const Image& image, std::size_t y0, std::size_t x0, Size2 size) {
  if (y0 + size.h > image.h || x0 + size.w > image.w || size.h == 0 || size.w == 0) {
    throw ConfigError("crop " + std::to_string(size.h) + "x" + std::to_string(size.w) + " does not fit image " +
                      std::to_string(image.h) + "x" + std::to_string(image.w));
  }
  Image out(image.c, size.h, size.w);
  for (std::size_t c = 0; c < image.c; ++c)
    for (std::size_t y = 0; y < size.h; ++y)
      for (std::size_t x = 0; x < size.w; ++x) out.at(c, y, x) = image.at(c, y0 + y, x0 + x);
  return out;
}

TriStateGroundTruth crop(const TriStateGroundTruth& gt, std::size_t y0, std::size_t x0, Size2 size) {
  if (y0 + size.h > gt.height() || x0 + size.w > gt.width() || size.h == 0 || size.w == 0) {
    throw ConfigError("crop does not fit ground truth");
  }
  TriStateGroundTruth out(size.h, size.w);
  for (std::size_t y = 0; y < size.h; ++y)
    for (std::size_t x = 0; x < size.w; ++x) out.labels.at(y, x) = gt.labels.at(y0 + y, x0 + x);
  return out;
}

std::vector<AugmentedPair> augment(const Image& image, const TriStateGroundTruth& gt, const AugmentPolicy& policy,
                                   std::uint64_t seed) {
  if (image.h != gt.height() || image.w != gt.width()) {
    throw DataError("augment: image and ground truth sizes differ");
  }
  std::mt19937_64 rng(seed);
  std::vector<AugmentedPair> out;
  for (int flip = 0; flip < (policy.horizontal_flip ? 2 : 1); ++flip) {
    const Image base = flip ? flip_horizontal(image) : image;
    const TriStateGroundTruth base_gt = flip ? flip_horizontal(gt) : gt;
    for (int turns = 0; turns < (policy.rotations ? 4 : 1); ++turns) {
      Image im = rotate90(base, turns);
      TriStateGroundTruth g = rotate90(base_gt, turns);
      if (!policy.crop) {
        out.push_back({std::move(im), std::move(g)});
        continue;
      }
      const Size2 size = *policy.crop;
      if (size.h > im.h || size.w > im.w) {
        throw ConfigError("augment: crop " + std::to_string(size.h) + "x" + std::to_string(size.w) +
                          " larger than image " + std::to_string(im.h) + "x" + std::to_string(im.w));
      }
      for (std::size_t k = 0; k < policy.crops_per_variant; ++k) {
        const std::size_t y = (im.h - size.h + 1) > 1 ? rng() % (im.h - size.h + 1) : 0;
        const std::size_t x = (im.w - size.w + 1) > 1 ? rng() % (im.w - size.w + 1) : 0;
        out.push_back({crop(im, y, x, size), crop(g, y, x, size)});
      }
    }
  }
  return out;
}

}  // namespace msmsf
