#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "msmsf/ground_truth.hpp"
#include "msmsf/image.hpp"
#include "msmsf/ops.hpp"

namespace msmsf {

struct AugmentPolicy {
  std::string id = "identity";
  bool horizontal_flip = false;
  bool rotations = false;  // 0, 90, 180 and 270 degrees
  std::optional<Size2> crop;
  std::size_t crops_per_variant = 1;

  static AugmentPolicy identity() { return {}; }
  /// The eight dihedral variants of each sample.
  static AugmentPolicy flip_rotate();
  /// Resolves "identity" or "flip-rotate".
  static AugmentPolicy from_id(const std::string& id);
};

struct AugmentedPair {
  Image image;
  TriStateGroundTruth gt;
};

Image flip_horizontal(const Image& image);
TriStateGroundTruth flip_horizontal(const TriStateGroundTruth& gt);
/// Rotates counter-clockwise by quarter_turns * 90 degrees.
Image rotate90(const Image& image, int quarter_turns);
TriStateGroundTruth rotate90(const TriStateGroundTruth& gt, int quarter_turns);
Image crop(const Image& image, std::size_t y, std::size_t x, Size2 size);
TriStateGroundTruth crop(const TriStateGroundTruth& gt, std::size_t y, std::size_t x, Size2 size);

/// Every flip/rotation variant allowed by the policy, each optionally
/// cropped at seeded random offsets. Image and labels move together.
std::vector<AugmentedPair> augment(const Image& image, const TriStateGroundTruth& gt, const AugmentPolicy& policy,
                                   std::uint64_t seed);

}  // namespace msmsf
