#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "msmsf/image.hpp"

namespace msmsf {

enum class Label : std::uint8_t { negative = 0, positive = 1, ignore = 2 };

struct ClassCounts {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t ignored = 0;

  std::size_t labeled() const { return positives + negatives; }
  /// |G-| / (|G+| + |G-|) over non-ignored pixels; requires labeled() > 0.
  double lambda() const;
};

/// Per-pixel {positive, negative, ignore} labels.
struct TriStateGroundTruth {
  Plane<Label> labels;

  TriStateGroundTruth() = default;
  TriStateGroundTruth(std::size_t h, std::size_t w, Label fill = Label::negative) : labels(h, w, fill) {}

  std::size_t height() const { return labels.h; }
  std::size_t width() const { return labels.w; }
  ClassCounts counts() const;

  /// Positives become 1, everything else 0.
  BinaryMap positives() const;
  static TriStateGroundTruth from_binary(const BinaryMap& edges);

  friend bool operator==(const TriStateGroundTruth&, const TriStateGroundTruth&) = default;
};

/// Positive where at least `k` annotators mark an edge, negative where none
/// do, ignore in between.
TriStateGroundTruth consensus_gt(std::span<const BinaryMap> annotations, std::size_t k = 3);

}  // namespace msmsf
