#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "msmsf/image.hpp"

namespace msmsf {

struct SyntheticSample {
  Image image;
  BinaryMap edges;
};

/// Gray-level scene of axis-aligned filled rectangles and one-pixel lines.
/// Edge pixels are the rectangle pixels with a 4-neighbour of a different
/// intensity, plus every line pixel. Replicated to `channels` channels.
SyntheticSample make_synthetic_sample(std::uint64_t seed, std::size_t height = 64, std::size_t width = 64,
                                      std::size_t channels = 3);

/// Writes <dir>/images/*.png, <dir>/gt/*.png and <dir>/manifest.json.
void write_synthetic_dataset(const std::filesystem::path& dir, std::size_t count, std::uint64_t seed,
                             std::size_t height = 64, std::size_t width = 64);

}  // namespace msmsf
