#include "msmsf/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <unordered_set>

#include "msmsf/errors.hpp"

namespace msmsf {

namespace {

constexpr std::size_t kMagicLen = sizeof(kCheckpointMagic) - 1;

class Writer {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  template <class U>
  void le(U value) {
    for (std::size_t i = 0; i < sizeof(U); ++i) out_.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::span<const std::uint8_t> take(std::size_t n) {
    if (pos_ + n > data_.size()) {
      throw DataError("checkpoint truncated at byte " + std::to_string(data_.size()) + " (needed " +
                      std::to_string(pos_ + n) + ")");
    }
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  template <class U>
  U le() {
    const auto s = take(sizeof(U));
    U value = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(static_cast<U>(s[i]) << (8 * i));
    return value;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

std::string extents_str(const std::vector<std::uint32_t>& e) {
  std::string s = "[";
  for (std::size_t i = 0; i < e.size(); ++i) s += (i ? "," : "") + std::to_string(e[i]);
  return s + "]";
}

std::vector<std::uint32_t> logical_extents(const NamedParameter& p) {
  const Shape& s = p.tensor.shape();
  if (p.rank == 1) return {static_cast<std::uint32_t>(p.tensor.numel())};
  return {static_cast<std::uint32_t>(s.n), static_cast<std::uint32_t>(s.c), static_cast<std::uint32_t>(s.h),
          static_cast<std::uint32_t>(s.w)};
}

bool is_state(const std::string& name) { return name.rfind(kStatePrefix, 0) == 0; }

}  // namespace

const CheckpointEntry* Checkpoint::find(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::size_t Checkpoint::parameter_count() const {
  std::size_t n = 0;
  for (const auto& e : entries) {
    if (!is_state(e.name)) n += e.values.size();
  }
  return n;
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  w.bytes(kCheckpointMagic, kMagicLen);
  w.le<std::uint32_t>(static_cast<std::uint32_t>(ckpt.entries.size()));
  for (const auto& e : ckpt.entries) {
    if (e.name.size() > 0xFFFF) throw ConfigError("checkpoint entry name too long: " + e.name.substr(0, 64));
    if (e.extents.size() > 0xFF) throw ConfigError("checkpoint entry rank too large: " + e.name);
    std::size_t count = 1;
    for (const auto x : e.extents) count *= x;
    if (count != e.values.size()) {
      throw ConfigError("checkpoint entry " + e.name + " has " + std::to_string(e.values.size()) +
                        " values for extents " + extents_str(e.extents));
    }
    w.le<std::uint16_t>(static_cast<std::uint16_t>(e.name.size()));
    w.bytes(e.name.data(), e.name.size());
    w.le<std::uint8_t>(static_cast<std::uint8_t>(e.extents.size()));
    for (const auto x : e.extents) w.le<std::uint32_t>(x);
    for (const float v : e.values) w.le<std::uint32_t>(std::bit_cast<std::uint32_t>(v));
  }
  return w.take();
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (bytes.size() < kMagicLen) throw DataError("checkpoint too short for header");
  const auto magic = r.take(kMagicLen);
  if (std::memcmp(magic.data(), kCheckpointMagic, kMagicLen) != 0) {
    if (std::memcmp(magic.data(), kCheckpointMagic, kMagicLen - 1) == 0) {
      throw DataError(std::string("unsupported checkpoint version '") + static_cast<char>(magic[kMagicLen - 1]) +
                      "' (expected '" + kCheckpointMagic[kMagicLen - 1] + "')");
    }
    throw DataError("not a checkpoint: bad magic bytes");
  }
  Checkpoint ckpt;
  const auto count = r.le<std::uint32_t>();
  std::unordered_set<std::string> seen;
  for (std::uint32_t i = 0; i < count; ++i) {
    CheckpointEntry e;
    const auto name_len = r.le<std::uint16_t>();
    const auto name = r.take(name_len);
    e.name.assign(name.begin(), name.end());
    if (!seen.insert(e.name).second) throw DataError("duplicate checkpoint entry " + e.name);
    const auto rank = r.le<std::uint8_t>();
    std::size_t n = 1;
    for (std::uint8_t d = 0; d < rank; ++d) {
      e.extents.push_back(r.le<std::uint32_t>());
      n *= e.extents.back();
    }
    e.values.resize(n);
    for (auto& v : e.values) v = std::bit_cast<float>(r.le<std::uint32_t>());
    ckpt.entries.push_back(std::move(e));
  }
  if (!r.done()) throw DataError("trailing bytes after checkpoint entries");
  return ckpt;
}

void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const auto bytes = encode_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_checkpoint(bytes);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

Checkpoint to_checkpoint(const MsmsfNet& net) {
  Checkpoint ckpt;
  for (const auto& p : net.parameters()) {
    ckpt.entries.push_back({p.name, logical_extents(p), {p.tensor.values().begin(), p.tensor.values().end()}});
  }
  return ckpt;
}

void load_parameters(MsmsfNet& net, const Checkpoint& ckpt) {
  auto params = net.parameters();
  std::unordered_set<std::string> expected;
  for (auto& p : params) {
    expected.insert(p.name);
    const CheckpointEntry* e = ckpt.find(p.name);
    if (!e) throw DataError("checkpoint is missing parameter " + p.name);
    const auto want = logical_extents(p);
    if (e->extents != want) {
      throw DataError("shape mismatch for " + p.name + ": checkpoint " + extents_str(e->extents) + ", config " +
                      extents_str(want));
    }
  }
  for (const auto& e : ckpt.entries) {
    if (!is_state(e.name) && !expected.contains(e.name)) {
      throw DataError("checkpoint parameter " + e.name + " does not exist in this config");
    }
  }
  for (auto& p : params) {
    const auto& src = ckpt.find(p.name)->values;
    std::copy(src.begin(), src.end(), p.tensor.values().begin());
  }
}

void save_checkpoint(const MsmsfNet& net, const std::filesystem::path& path) {
  write_checkpoint(to_checkpoint(net), path);
}

MsmsfNet load_checkpoint(const std::filesystem::path& path, const MsmsfNetConfig& config) {
  MsmsfNet net = build_net(config, 0);
  load_parameters(net, read_checkpoint(path));
  return net;
}

}  // namespace msmsf
