#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msmsf/model.hpp"

namespace msmsf {

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t step = 0;
  // One moment array per parameter, same order as the parameter list.
  std::vector<std::vector<float>> first_moment;
  std::vector<std::vector<float>> second_moment;
};

/// Bias-corrected Adam with coupled weight decay (g += wd * theta). Missing
/// gradients count as zero. A non-finite gradient throws NumericError naming
/// the parameter; nothing is updated in that case.
void adam_step(std::vector<NamedParameter>& params, AdamState& state, double lr, double weight_decay);

enum class DatasetProfile { biped, bsds, nyud };

DatasetProfile parse_dataset_profile(const std::string& name);
std::string to_string(DatasetProfile profile);

struct LrSchedule {
  double initial_lr = 1e-4;
  // Epochs 1..drop_after use initial_lr; later epochs divide by drop_factor.
  std::size_t drop_after = 10;
  double drop_factor = 10.0;
  std::size_t max_epochs = 15;

  static LrSchedule for_profile(DatasetProfile profile);
  double at(std::size_t epoch) const;
};

/// Learning rate for a 1-based epoch under the profile's schedule.
double lr_at(std::size_t epoch, DatasetProfile profile);

}  // namespace msmsf
