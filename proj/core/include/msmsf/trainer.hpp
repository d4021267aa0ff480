#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "msmsf/augment.hpp"
#include "msmsf/checkpoint.hpp"
#include "msmsf/ground_truth.hpp"
#include "msmsf/model.hpp"
#include "msmsf/optimizer.hpp"

namespace msmsf {

struct TrainConfig {
  DatasetProfile profile = DatasetProfile::biped;
  std::size_t batch_size = 6;
  LrSchedule schedule = LrSchedule::for_profile(DatasetProfile::biped);
  double weight_decay = 1e-12;
  std::array<double, 3> side_weights{1.0, 1.0, 1.0};
  std::uint64_t seed = 0;
  // Training crops; clipped to the smallest image in the set.
  Size2 crop{320, 320};
  // Stop after this many optimizer steps; 0 runs schedule.max_epochs.
  std::size_t max_steps = 0;
  AugmentPolicy augment;

  static TrainConfig for_profile(DatasetProfile profile);
  void validate() const;
};

struct TrainingSample {
  std::string id;
  Image image;
  TriStateGroundTruth gt;
};

struct LossRecord {
  std::size_t step = 0;
  std::size_t epoch = 0;
  double lr = 0.0;
  double total = 0.0;
  std::array<double, 3> sides{};
  double fused = 0.0;
};

struct TrainHooks {
  std::function<void(const LossRecord&)> on_step;
  std::function<void(std::size_t epoch, const MsmsfNet&, const AdamState&)> on_epoch_end;
};

struct TrainResult {
  std::vector<LossRecord> log;
  AdamState optimizer;
  std::size_t epochs_completed = 0;
  std::size_t skipped_samples = 0;
};

/// Applies the augmentation policy to every sample and drops samples whose
/// labels are all ignored.
std::vector<TrainingSample> prepare_training_set(const std::vector<TrainingSample>& raw, const AugmentPolicy& policy,
                                                 std::uint64_t seed, std::size_t* skipped = nullptr);

/// Seeded shuffled mini-batches of common-size crops; one total_loss
/// backward and Adam step per batch. Deterministic for a fixed seed.
TrainResult train(const std::vector<TrainingSample>& samples, MsmsfNet& net, const TrainConfig& config,
                  const TrainHooks& hooks = {});

/// total_loss of the net on each sample (full size, no crop), summed.
double evaluate_loss(const MsmsfNet& net, const std::vector<TrainingSample>& samples,
                     const std::array<double, 3>& side_weights = {1.0, 1.0, 1.0});

std::string loss_log_header();
std::string format_loss_record(const LossRecord& record);

/// Checkpoint of the parameters plus Adam moments, step and epoch under
/// the "state/" prefix.
Checkpoint training_checkpoint(const MsmsfNet& net, const AdamState& state, std::size_t epoch);

}  // namespace msmsf
