#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "msmsf/image.hpp"
#include "msmsf/inference.hpp"

namespace msmsf {

/// Reads PNG (8 or 16 bit, gray/RGB, alpha dropped) or binary/ASCII PGM/PPM.
/// Samples are scaled to [0, 1]. Unreadable or malformed files raise DataError.
Image read_image(const std::filesystem::path& path);

/// Single-channel edge annotation: any non-zero sample is an edge.
BinaryMap read_edge_map(const std::filesystem::path& path);

/// 8-bit PNG with 1 or 3 channels; values are clamped to [0, 1] and rounded.
void write_png(const Image& image, const std::filesystem::path& path);
void write_png(const BinaryMap& map, const std::filesystem::path& path);

/// Probability map as 8-bit PNG (<stem>.png) plus exact float sidecar
/// (<stem>.f32).
void write_prediction(const EdgeProbabilityMap& map, const std::filesystem::path& stem);

/// Sidecar layout: "MSF32\n", u32 height, u32 width (little endian), then
/// row-major float32 values.
void write_float_map(const Plane<float>& map, const std::filesystem::path& path);
Plane<float> read_float_map(const std::filesystem::path& path);

/// Prefers <stem>.f32; falls back to <stem>.png divided by 255.
EdgeProbabilityMap read_prediction(const std::filesystem::path& stem);

/// Subtracts a per-channel mean in place.
void subtract_mean(Image& image, const std::vector<float>& mean);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace msmsf
