#include "msmsf/io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "msmsf/errors.hpp"

namespace msmsf {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw DataError("cannot open " + path.string());
  return f;
}

Image read_png(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  png_byte sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw DataError(path.string() + ": not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw DataError("libpng: out of memory");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw DataError("libpng: out of memory");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError(path.string() + ": corrupt PNG");
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_png(png, info, PNG_TRANSFORM_EXPAND | PNG_TRANSFORM_STRIP_ALPHA | PNG_TRANSFORM_PACKING, nullptr);
  const std::size_t w = png_get_image_width(png, info);
  const std::size_t h = png_get_image_height(png, info);
  const int depth = png_get_bit_depth(png, info);
  const std::size_t channels = png_get_channels(png, info);
  png_bytepp rows = png_get_rows(png, info);
  Image img(channels, h, w);
  const double max_value = depth == 16 ? 65535.0 : 255.0;
  for (std::size_t y = 0; y < h; ++y) {
    const png_bytep row = rows[y];
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < channels; ++c) {
        const std::size_t i = x * channels + c;
        const unsigned v = depth == 16 ? (unsigned{row[2 * i]} << 8) | row[2 * i + 1] : row[i];
        img.at(c, y, x) = static_cast<float>(v / max_value);
      }
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

// Netpbm token reader that skips whitespace and '#' comments.
class PnmReader {
 public:
  explicit PnmReader(std::string bytes) : bytes_(std::move(bytes)) {}

  std::string token() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
        ++pos_;
      } else {
        break;
      }
    }
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    return bytes_.substr(start, pos_ - start);
  }

  std::size_t number(const std::string& what) {
    const std::string t = token();
    if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      throw DataError("PNM: bad " + what);
    }
    return std::stoul(t);
  }

  // Binary data starts after exactly one whitespace byte.
  std::size_t raster_start() { return pos_ + 1; }
  const std::string& bytes() const { return bytes_; }

 private:
  std::string bytes_;
  std::size_t pos_ = 0;
};

Image read_pnm(const std::filesystem::path& path) {
  PnmReader r(read_text_file(path));
  const std::string magic = r.token();
  const bool ascii = magic == "P2" || magic == "P3";
  const bool binary = magic == "P5" || magic == "P6";
  if (!ascii && !binary) throw DataError(path.string() + ": unsupported PNM type '" + magic + "'");
  const std::size_t channels = (magic == "P3" || magic == "P6") ? 3 : 1;
  const std::size_t w = r.number("width");
  const std::size_t h = r.number("height");
  const std::size_t maxval = r.number("maxval");
  if (w == 0 || h == 0 || maxval == 0 || maxval > 65535) throw DataError(path.string() + ": bad PNM header");
  Image img(channels, h, w);
  const std::size_t n = w * h * channels;
  std::vector<unsigned> samples(n);
  if (ascii) {
    for (auto& s : samples) s = static_cast<unsigned>(r.number("sample"));
  } else {
    const std::size_t bps = maxval > 255 ? 2 : 1;
    const std::size_t start = r.raster_start();
    if (r.bytes().size() < start + n * bps) throw DataError(path.string() + ": truncated PNM raster");
    const auto* p = reinterpret_cast<const unsigned char*>(r.bytes().data() + start);
    for (std::size_t i = 0; i < n; ++i) samples[i] = bps == 2 ? (unsigned{p[2 * i]} << 8) | p[2 * i + 1] : p[i];
  }
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t c = 0; c < channels; ++c) {
        const unsigned v = samples[(y * w + x) * channels + c];
        if (v > maxval) throw DataError(path.string() + ": sample exceeds maxval");
        img.at(c, y, x) = static_cast<float>(static_cast<double>(v) / static_cast<double>(maxval));
      }
    }
  }
  return img;
}

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

void write_png_bytes(const std::vector<std::uint8_t>& data, std::size_t channels, std::size_t h, std::size_t w,
                     const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, data.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw DataError("cannot write " + path.string() + ": " + msg);
  }
}

std::uint8_t to_byte(float v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const std::string& s, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{static_cast<unsigned char>(s[at + i])} << (8 * i);
  return v;
}

constexpr char kFloatMagic[] = "MSF32\n";
constexpr std::size_t kFloatMagicLen = sizeof(kFloatMagic) - 1;

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("failed writing " + path.string());
}

Image read_image(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw DataError("missing image file " + path.string());
  const std::string ext = lower_extension(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return read_pnm(path);
  throw DataError(path.string() + ": unsupported image format (expected .png, .pgm or .ppm)");
}

BinaryMap read_edge_map(const std::filesystem::path& path) {
  const Image img = read_image(path);
  BinaryMap out(img.h, img.w, 0);
  for (std::size_t y = 0; y < img.h; ++y) {
    for (std::size_t x = 0; x < img.w; ++x) {
      bool edge = false;
      for (std::size_t c = 0; c < img.c; ++c) edge = edge || img.at(c, y, x) > 0.0f;
      out.at(y, x) = edge ? 1 : 0;
    }
  }
  return out;
}

void write_png(const Image& image, const std::filesystem::path& path) {
  if (image.c != 1 && image.c != 3) throw DataError("write_png: expected 1 or 3 channels");
  std::vector<std::uint8_t> data(image.h * image.w * image.c);
  for (std::size_t y = 0; y < image.h; ++y)
    for (std::size_t x = 0; x < image.w; ++x)
      for (std::size_t c = 0; c < image.c; ++c) data[(y * image.w + x) * image.c + c] = to_byte(image.at(c, y, x));
  write_png_bytes(data, image.c, image.h, image.w, path);
}

void write_png(const BinaryMap& map, const std::filesystem::path& path) {
  std::vector<std::uint8_t> data(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) data[i] = map.data[i] ? 255 : 0;
  write_png_bytes(data, 1, map.h, map.w, path);
}

void write_float_map(const Plane<float>& map, const std::filesystem::path& path) {
  std::string out(kFloatMagic, kFloatMagicLen);
  put_u32(out, static_cast<std::uint32_t>(map.h));
  put_u32(out, static_cast<std::uint32_t>(map.w));
  for (const float v : map.data) put_u32(out, std::bit_cast<std::uint32_t>(v));
  write_text_file(path, out);
}

Plane<float> read_float_map(const std::filesystem::path& path) {
  const std::string s = read_text_file(path);
  if (s.size() < kFloatMagicLen + 8 || s.compare(0, kFloatMagicLen, kFloatMagic) != 0) {
    throw DataError(path.string() + ": not a float map");
  }
  const std::size_t h = get_u32(s, kFloatMagicLen);
  const std::size_t w = get_u32(s, kFloatMagicLen + 4);
  const std::size_t start = kFloatMagicLen + 8;
  if (s.size() != start + 4 * h * w) throw DataError(path.string() + ": float map size mismatch");
  Plane<float> map(h, w);
  for (std::size_t i = 0; i < h * w; ++i) map.data[i] = std::bit_cast<float>(get_u32(s, start + 4 * i));
  return map;
}

void write_prediction(const EdgeProbabilityMap& map, const std::filesystem::path& stem) {
  if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());
  Image img(1, map.height(), map.width());
  img.data = map.values.data;
  auto png = stem;
  png += ".png";
  auto f32 = stem;
  f32 += ".f32";
  write_png(img, png);
  write_float_map(map.values, f32);
}

EdgeProbabilityMap read_prediction(const std::filesystem::path& stem) {
  auto f32 = stem;
  f32 += ".f32";
  if (std::filesystem::is_regular_file(f32)) return {read_float_map(f32)};
  auto png = stem;
  png += ".png";
  const Image img = read_image(png);
  EdgeProbabilityMap out{Plane<float>(img.h, img.w)};
  for (std::size_t i = 0; i < img.h * img.w; ++i) out.values.data[i] = img.data[i];
  return out;
}

void subtract_mean(Image& image, const std::vector<float>& mean) {
  if (mean.empty()) return;
  if (mean.size() != image.c) {
    throw ConfigError("mean has " + std::to_string(mean.size()) + " values for a " + std::to_string(image.c) +
                      "-channel image");
  }
  for (std::size_t c = 0; c < image.c; ++c)
    for (std::size_t i = 0; i < image.h * image.w; ++i) image.data[c * image.h * image.w + i] -= mean[c];
}

}  // namespace msmsf
