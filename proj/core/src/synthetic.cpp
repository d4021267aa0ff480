#include "msmsf/synthetic.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "msmsf/errors.hpp"
#include "msmsf/io.hpp"

namespace msmsf {

namespace {

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

}  // namespace

SyntheticSample make_synthetic_sample(std::uint64_t seed, std::size_t height, std::size_t width,
                                      std::size_t channels) {
  if (height < 16 || width < 16) throw ConfigError("synthetic images need at least 16x16 pixels");
  std::mt19937_64 rng(seed ^ 0x5DEECE66DULL);
  Plane<float> level(height, width, static_cast<float>(0.05 + 0.25 * uniform(rng)));

  const std::size_t rects = pick(rng, 2, 3);
  for (std::size_t r = 0; r < rects; ++r) {
    const std::size_t h = pick(rng, height / 6, height / 2);
    const std::size_t w = pick(rng, width / 6, width / 2);
    const std::size_t y0 = pick(rng, 2, height - h - 2);
    const std::size_t x0 = pick(rng, 2, width - w - 2);
    // Levels step up with drawing order so overlapping rectangles stay distinct.
    const float v = static_cast<float>(0.4 + 0.15 * static_cast<double>(r) + 0.05 * uniform(rng));
    for (std::size_t y = y0; y < y0 + h; ++y)
      for (std::size_t x = x0; x < x0 + w; ++x) level.at(y, x) = v;
  }
  const bool horizontal = (rng() & 1) != 0;
  const std::size_t at = horizontal ? pick(rng, 3, height - 4) : pick(rng, 3, width - 4);
  const std::size_t from = pick(rng, 2, (horizontal ? width : height) / 3);
  const std::size_t to = pick(rng, 2 * (horizontal ? width : height) / 3, (horizontal ? width : height) - 3);
  for (std::size_t t = from; t <= to; ++t) {
    if (horizontal) {
      level.at(at, t) = 0.95f;
    } else {
      level.at(t, at) = 0.95f;
    }
  }

  SyntheticSample s;
  s.image = Image(channels, height, width);
  for (std::size_t c = 0; c < channels; ++c)
    std::copy(level.data.begin(), level.data.end(), s.image.data.begin() + static_cast<long>(c * height * width));
  // An edge pixel is the brighter side of an intensity step.
  s.edges = BinaryMap(height, width, 0);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const float v = level.at(y, x);
      const bool step = (y > 0 && level.at(y - 1, x) < v) || (y + 1 < height && level.at(y + 1, x) < v) ||
                        (x > 0 && level.at(y, x - 1) < v) || (x + 1 < width && level.at(y, x + 1) < v);
      s.edges.at(y, x) = step ? 1 : 0;
    }
  }
  return s;
}

void write_synthetic_dataset(const std::filesystem::path& dir, std::size_t count, std::uint64_t seed,
                             std::size_t height, std::size_t width) {
  std::filesystem::create_directories(dir / "images");
  std::filesystem::create_directories(dir / "gt");
  std::string entries;
  for (std::size_t i = 0; i < count; ++i) {
    const SyntheticSample s = make_synthetic_sample(seed + i, height, width);
    char name[32];
    std::snprintf(name, sizeof(name), "synth_%03zu", i);
    write_png(s.image, dir / "images" / (std::string(name) + ".png"));
    write_png(s.edges, dir / "gt" / (std::string(name) + ".png"));
    entries += std::string(i ? ",\n" : "") + "    {\"image\": \"images/" + name + ".png\", \"annotations\": [\"gt/" +
               name + ".png\"], \"modality\": \"rgb\"}";
  }
  write_text_file(dir / "manifest.json", "{\n  \"name\": \"synthetic\",\n  \"split\": \"train\",\n  \"augmentation\": "
                                         "\"identity\",\n  \"entries\": [\n" +
                                             entries + "\n  ]\n}\n");
}

}  // namespace msmsf
