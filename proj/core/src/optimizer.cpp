#include "msmsf/optimizer.hpp"

#include <cmath>

#include "msmsf/errors.hpp"

namespace msmsf {

void adam_step(std::vector<NamedParameter>& params, AdamState& state, double lr, double weight_decay) {
  if (state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.emplace_back(p.tensor.numel(), 0.0f);
      state.second_moment.emplace_back(p.tensor.numel(), 0.0f);
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw ConfigError("adam_step: optimizer state has " + std::to_string(state.first_moment.size()) +
                      " moment arrays for " + std::to_string(params.size()) + " parameters");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (state.first_moment[k].size() != params[k].tensor.numel()) {
      throw ConfigError("adam_step: moment shape mismatch for " + params[k].name);
    }
    for (const float g : params[k].tensor.grad()) {
      if (!std::isfinite(g)) throw NumericError("non-finite gradient in parameter " + params[k].name);
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto theta = params[k].tensor.values();
    const auto grad = params[k].tensor.grad();
    auto& m = state.first_moment[k];
    auto& v = state.second_moment[k];
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double g = (grad.empty() ? 0.0 : static_cast<double>(grad[i])) + weight_decay * theta[i];
      const double mi = state.beta1 * m[i] + (1.0 - state.beta1) * g;
      const double vi = state.beta2 * v[i] + (1.0 - state.beta2) * g * g;
      m[i] = static_cast<float>(mi);
      v[i] = static_cast<float>(vi);
      theta[i] = static_cast<float>(theta[i] - lr * (mi / c1) / (std::sqrt(vi / c2) + state.eps));
    }
  }
}

DatasetProfile parse_dataset_profile(const std::string& name) {
  if (name == "biped") return DatasetProfile::biped;
  if (name == "bsds") return DatasetProfile::bsds;
  if (name == "nyud") return DatasetProfile::nyud;
  throw ConfigError("unknown dataset profile '" + name + "' (expected biped, bsds or nyud)");
}

std::string to_string(DatasetProfile profile) {
  switch (profile) {
    case DatasetProfile::biped: return "biped";
    case DatasetProfile::bsds: return "bsds";
    case DatasetProfile::nyud: return "nyud";
  }
  return "biped";
}

LrSchedule LrSchedule::for_profile(DatasetProfile profile) {
  LrSchedule s;
  if (profile == DatasetProfile::biped) {
    s.drop_after = 10;
    s.max_epochs = 15;
  } else {
    s.drop_after = 20;
    s.max_epochs = 25;
  }
  return s;
}

double LrSchedule::at(std::size_t epoch) const {
  if (epoch == 0) throw ConfigError("epochs are 1-based");
  return epoch <= drop_after ? initial_lr : initial_lr / drop_factor;
}

double lr_at(std::size_t epoch, DatasetProfile profile) { return LrSchedule::for_profile(profile).at(epoch); }

}  // namespace msmsf
