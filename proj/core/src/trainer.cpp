#include "msmsf/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <random>

#include "msmsf/errors.hpp"
#include "msmsf/loss.hpp"

namespace msmsf {

namespace {

// Fisher-Yates with raw engine output so the order does not depend on the
// standard library's distribution implementation.
void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = rng() % i;
    std::swap(v[i - 1], v[j]);
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

TrainConfig TrainConfig::for_profile(DatasetProfile profile) {
  TrainConfig cfg;
  cfg.profile = profile;
  cfg.schedule = LrSchedule::for_profile(profile);
  return cfg;
}

void TrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (!(schedule.initial_lr > 0.0) || !(schedule.drop_factor > 0.0)) {
    throw ConfigError("learning rate and drop factor must be positive");
  }
  if (weight_decay < 0.0) throw ConfigError("weight decay must be non-negative");
  for (const double b : side_weights) {
    if (!(b > 0.0)) throw ConfigError("side loss weights must be positive");
  }
  if (crop.h == 0 || crop.w == 0) throw ConfigError("crop size must be positive");
  if (schedule.max_epochs == 0 && max_steps == 0) throw ConfigError("nothing to train: zero epochs and steps");
}

std::vector<TrainingSample> prepare_training_set(const std::vector<TrainingSample>& raw, const AugmentPolicy& policy,
                                                 std::uint64_t seed, std::size_t* skipped) {
  std::vector<TrainingSample> out;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto pairs = augment(raw[i].image, raw[i].gt, policy, seed + i);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      if (pairs[k].gt.counts().labeled() == 0) {
        std::clog << "warning: skipping " << raw[i].id << " variant " << k << ": every pixel is ignored\n";
        ++dropped;
        continue;
      }
      out.push_back({raw[i].id + (pairs.size() > 1 ? "#" + std::to_string(k) : ""), std::move(pairs[k].image),
                     std::move(pairs[k].gt)});
    }
  }
  if (skipped) *skipped = dropped;
  return out;
}

TrainResult train(const std::vector<TrainingSample>& samples, MsmsfNet& net, const TrainConfig& config,
                  const TrainHooks& hooks) {
  config.validate();
  if (samples.empty()) throw DataError("training set is empty");

  Size2 crop_size = config.crop;
  for (const auto& s : samples) {
    if (s.image.h != s.gt.height() || s.image.w != s.gt.width()) {
      throw DataError("sample " + s.id + ": image and ground truth sizes differ");
    }
    crop_size.h = std::min(crop_size.h, s.image.h);
    crop_size.w = std::min(crop_size.w, s.image.w);
  }

  TrainResult result;
  auto params = net.parameters();
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(samples.size());
  std::size_t step = 0;
  const std::size_t max_epochs =
      config.max_steps > 0 ? std::numeric_limits<std::size_t>::max() : config.schedule.max_epochs;

  for (std::size_t epoch = 1; epoch <= max_epochs; ++epoch) {
    const double lr = config.schedule.at(epoch);
    const std::size_t steps_before = step;
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle(order, rng);

    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      if (config.max_steps > 0 && step >= config.max_steps) break;
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      std::vector<Image> images;
      std::vector<TriStateGroundTruth> gts;
      for (std::size_t k = begin; k < end; ++k) {
        const auto& s = samples[order[k]];
        const std::size_t y = s.image.h > crop_size.h ? rng() % (s.image.h - crop_size.h + 1) : 0;
        const std::size_t x = s.image.w > crop_size.w ? rng() % (s.image.w - crop_size.w + 1) : 0;
        TriStateGroundTruth g = crop(s.gt, y, x, crop_size);
        if (g.counts().labeled() == 0) {
          std::clog << "warning: skipping crop of " << s.id << " at step " << step + 1 << ": every pixel is ignored\n";
          ++result.skipped_samples;
          continue;
        }
        images.push_back(crop(s.image, y, x, crop_size));
        gts.push_back(std::move(g));
      }
      if (images.empty()) continue;

      std::vector<const Image*> batch;
      for (const auto& im : images) batch.push_back(&im);
      for (auto& p : params) p.tensor.zero_grad();
      const NetOutputs outputs = net.forward(to_tensor(batch));
      const LossBreakdown loss = total_loss(outputs, gts, config.side_weights);
      const double total = loss.total.item();
      ++step;
      if (!std::isfinite(total)) throw NumericError("non-finite loss at step " + std::to_string(step));
      loss.total.backward();
      adam_step(params, result.optimizer, lr, config.weight_decay);

      LossRecord rec{step, epoch, lr, total, loss.sides, loss.fused};
      result.log.push_back(rec);
      if (hooks.on_step) hooks.on_step(rec);
    }
    if (step == steps_before) throw DataError("epoch " + std::to_string(epoch) + " produced no labeled crop");
    result.epochs_completed = epoch;
    if (hooks.on_epoch_end) hooks.on_epoch_end(epoch, net, result.optimizer);
    if (config.max_steps > 0 && step >= config.max_steps) break;
  }
  return result;
}

double evaluate_loss(const MsmsfNet& net, const std::vector<TrainingSample>& samples,
                     const std::array<double, 3>& side_weights) {
  NoGradGuard no_grad;
  double total = 0.0;
  for (const auto& s : samples) {
    const NetOutputs out = net.forward(to_tensor(s.image));
    total += total_loss(out, std::span<const TriStateGroundTruth>(&s.gt, 1), side_weights).total.item();
  }
  return total;
}

std::string loss_log_header() { return "step,epoch,lr,total_loss,side1_loss,side2_loss,side3_loss,fuse_loss\n"; }

std::string format_loss_record(const LossRecord& r) {
  return std::to_string(r.step) + "," + std::to_string(r.epoch) + "," + fmt(r.lr) + "," + fmt(r.total) + "," +
         fmt(r.sides[0]) + "," + fmt(r.sides[1]) + "," + fmt(r.sides[2]) + "," + fmt(r.fused) + "\n";
}

Checkpoint training_checkpoint(const MsmsfNet& net, const AdamState& state, std::size_t epoch) {
  Checkpoint ckpt = to_checkpoint(net);
  const auto params = net.parameters();
  for (std::size_t k = 0; k < state.first_moment.size() && k < params.size(); ++k) {
    const auto n = static_cast<std::uint32_t>(state.first_moment[k].size());
    ckpt.entries.push_back({std::string(kStatePrefix) + "adam_m/" + params[k].name, {n}, state.first_moment[k]});
    ckpt.entries.push_back({std::string(kStatePrefix) + "adam_v/" + params[k].name, {n}, state.second_moment[k]});
  }
  ckpt.entries.push_back({std::string(kStatePrefix) + "adam_step", {1}, {static_cast<float>(state.step)}});
  ckpt.entries.push_back({std::string(kStatePrefix) + "epoch", {1}, {static_cast<float>(epoch)}});
  return ckpt;
}

}  // namespace msmsf
