#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "msmsf/model.hpp"

namespace msmsf {

/// One named array. Extents are the logical shape (rank 4 for conv weights,
/// rank 1 for biases and most training-state arrays).
struct CheckpointEntry {
  std::string name;
  std::vector<std::uint32_t> extents;
  std::vector<float> values;
};

/// Ordered name -> array map. Entries whose name starts with "state/" carry
/// optional training state and are ignored when loading parameters.
struct Checkpoint {
  std::vector<CheckpointEntry> entries;

  const CheckpointEntry* find(const std::string& name) const;
  std::size_t parameter_count() const;
};

inline constexpr char kCheckpointMagic[] = "MSMSF1";
inline constexpr const char* kStatePrefix = "state/";

/// Binary layout: "MSMSF1", then little-endian u32 entry count and per entry
/// u16 name length, UTF-8 name, u8 rank, rank x u32 extents, float32 values.
std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint read_checkpoint(const std::filesystem::path& path);

Checkpoint to_checkpoint(const MsmsfNet& net);
/// Copies parameters into `net`. Missing, extra, or mis-shaped entries raise
/// DataError naming the first offender.
void load_parameters(MsmsfNet& net, const Checkpoint& ckpt);

void save_checkpoint(const MsmsfNet& net, const std::filesystem::path& path);
MsmsfNet load_checkpoint(const std::filesystem::path& path, const MsmsfNetConfig& config);

}  // namespace msmsf
