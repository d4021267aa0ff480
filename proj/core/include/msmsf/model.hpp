#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "msmsf/ops.hpp"
#include "msmsf/tensor.hpp"

namespace msmsf {

/// One convolution inside a branch or fusion step.
struct ConvStage {
  Size2 kernel{1, 1};
  std::size_t out_channels = 0;
};

struct BranchSpec {
  std::vector<ConvStage> stages;

  /// Input footprint of one output activation: 1 + sum(k - 1) per axis.
  Size2 receptive_field() const;
};

/// Four parallel branches, a pairwise first fusion step over `pairs`, and a
/// second fusion step whose final conv is the block's only activated layer.
struct MsmsfBlockConfig {
  std::size_t in_channels = 0;
  std::array<BranchSpec, 4> branches;
  std::array<std::array<std::size_t, 2>, 2> pairs{{{0, 1}, {2, 3}}};
  std::array<std::vector<ConvStage>, 2> pair_fusion;
  std::vector<ConvStage> output_fusion;
  bool terminal_relu = true;

  /// Throws ConfigError on any violated structural constraint.
  void validate() const;
  std::size_t out_channels() const { return output_fusion.back().out_channels; }
};

/// Kernel layout shared by every block of a net; channel counts come from
/// the stage width.
struct BlockTemplate {
  std::array<std::vector<Size2>, 4> branches;
  std::array<std::array<std::size_t, 2>, 2> pairs{{{0, 1}, {2, 3}}};
  std::vector<Size2> pair_fusion;
  std::vector<Size2> output_fusion;
};

struct StageConfig {
  std::size_t blocks = 1;
  std::size_t width = 8;
};

struct MsmsfNetConfig {
  std::string profile = "custom";
  std::size_t in_channels = 3;
  std::vector<StageConfig> stages;
  BlockTemplate block;
  // A 3x3/2 max-pool follows each listed stage.
  std::vector<std::size_t> pool_after{0, 1};
  // Stages whose last block feeds a side layer.
  std::vector<std::size_t> side_stages{0, 1, 2};
  std::size_t side_kernel = 3;
  std::size_t fusion_kernel = 3;

  void validate() const;
  MsmsfBlockConfig block_config(std::size_t stage, std::size_t index) const;
  /// Cumulative downsampling factor at the output of `stage`.
  std::size_t stage_stride(std::size_t stage) const;
  /// Smallest accepted input extent: 2^(number of pools).
  std::size_t min_input_extent() const;

  /// Test profile: widths 8/12/16, one block per stage, branch receptive
  /// fields 3/5/7/9 built from stacked 1x3/3x1 pairs.
  static MsmsfNetConfig tiny();
  /// 74-weight-layer reconstruction: widths 32/64/96, blocks 2/2/1, branch
  /// receptive fields 3/5/7/9 each from a single 1xn/nx1 pair.
  static MsmsfNetConfig paper_depth();
  /// Resolves "tiny" or "paper-depth"; throws ConfigError otherwise.
  static MsmsfNetConfig from_profile(const std::string& name);
};

struct ConvLayer {
  std::string name;
  ConvParams params;
  bool relu = false;

  Tensor forward(const Tensor& input) const;
  std::size_t parameter_count() const { return params.weight.numel() + params.bias.numel(); }
};

struct NamedParameter {
  std::string name;
  Tensor tensor;
  // Rank written to checkpoints: 4 for weights, 1 for biases.
  std::size_t rank;
};

class MsmsfBlock {
 public:
  MsmsfBlock() = default;
  MsmsfBlock(MsmsfBlockConfig config, std::array<std::vector<ConvLayer>, 4> branches,
             std::array<std::vector<ConvLayer>, 2> pair_fusion, std::vector<ConvLayer> output_fusion);

  Tensor forward(const Tensor& input) const;
  Tensor branch_forward(std::size_t branch, const Tensor& input) const;

  const MsmsfBlockConfig& config() const { return config_; }
  void collect(std::vector<NamedParameter>& out) const;
  std::size_t weight_layers() const;

 private:
  MsmsfBlockConfig config_;
  std::array<std::vector<ConvLayer>, 4> branches_;
  std::array<std::vector<ConvLayer>, 2> pair_fusion_;
  std::vector<ConvLayer> output_fusion_;
};

/// Logit maps at input resolution.
struct NetOutputs {
  std::array<Tensor, 3> sides;
  Tensor fused;
};

class MsmsfNet {
 public:
  MsmsfNet(MsmsfNetConfig config, std::vector<std::vector<MsmsfBlock>> stages, std::array<ConvLayer, 3> side_layers,
           ConvLayer fusion_layer);

  NetOutputs forward(const Tensor& image) const;

  const MsmsfNetConfig& config() const { return config_; }
  const std::vector<std::vector<MsmsfBlock>>& stages() const { return stages_; }

  /// Learnable tensors in a fixed order; handles share storage with the net.
  std::vector<NamedParameter> parameters() const;

 private:
  MsmsfNetConfig config_;
  std::vector<std::vector<MsmsfBlock>> stages_;
  std::array<ConvLayer, 3> side_layers_;
  ConvLayer fusion_layer_;
};

/// Xavier-uniform weights, zero biases, drawn from a stream seeded by `seed`.
MsmsfBlock build_block(const MsmsfBlockConfig& config, std::uint64_t seed, const std::string& prefix = "block");
MsmsfNet build_net(const MsmsfNetConfig& config, std::uint64_t seed);

/// Convolutions with learnable weights; fixed upsampling is not counted.
std::size_t count_block_weight_layers(const MsmsfBlockConfig& config);
std::size_t count_weight_layers(const MsmsfNetConfig& config);
std::size_t count_parameters(const MsmsfNet& net);
/// Parameter total computed from the config alone.
std::size_t count_parameters(const MsmsfNetConfig& config);

/// Learnable weights of one conv (biases excluded): c_in * c_out * kh * kw.
std::size_t conv_weight_count(std::size_t in_channels, std::size_t out_channels, Size2 kernel);
/// Weights of a sequential conv stack starting from `in_channels`.
std::size_t stack_weight_count(std::size_t in_channels, const std::vector<ConvStage>& stages);

/// Xavier-uniform bound sqrt(6 / (fan_in + fan_out)) for a conv weight.
double xavier_bound(const Shape& weight_shape);

/// Closed input interval [lo, hi] (may extend past the image) that can
/// influence an output coordinate, per axis.
struct Interval {
  long lo = 0;
  long hi = 0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct Support {
  Interval rows;
  Interval cols;
};

/// Composed receptive-field support of fused output pixel (y, x) for an
/// input of the given size, ignoring clipping at the image border except
/// where upsampling clamps indices.
Support fused_output_support(const MsmsfNetConfig& config, Size2 input, std::size_t y, std::size_t x);

/// Receptive field of a whole block (largest branch plus both fusion steps).
Size2 block_receptive_field(const MsmsfBlockConfig& config);

/// Receptive field (in input pixels) at the output of each stage.
std::vector<Size2> stage_receptive_fields(const MsmsfNetConfig& config);

}  // namespace msmsf
