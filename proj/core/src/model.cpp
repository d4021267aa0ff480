#include "msmsf/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "msmsf/errors.hpp"

namespace msmsf {

namespace {

bool is_asymmetric(Size2 k) { return k.h == 1 || k.w == 1; }

void check_kernel(Size2 k, const std::string& where) {
  if (k.h == 0 || k.w == 0 || k.h % 2 == 0 || k.w % 2 == 0) {
    throw ConfigError(where + ": kernel " + std::to_string(k.h) + "x" + std::to_string(k.w) +
                      " must have odd positive extents");
  }
}

void check_stages(const std::vector<ConvStage>& stages, const std::string& where, bool asymmetric_only) {
  if (stages.empty()) {
    throw ConfigError(where + ": needs at least one convolution");
  }
  for (const auto& s : stages) {
    check_kernel(s.kernel, where);
    if (asymmetric_only && !is_asymmetric(s.kernel)) {
      throw ConfigError(where + ": kernel " + std::to_string(s.kernel.h) + "x" + std::to_string(s.kernel.w) +
                        " is not spatially asymmetric (1xn or nx1)");
    }
    if (s.out_channels == 0) {
      throw ConfigError(where + ": zero output channels");
    }
  }
}

Size2 stack_rf(const std::vector<ConvStage>& stages) {
  Size2 rf{1, 1};
  for (const auto& s : stages) {
    rf.h += s.kernel.h - 1;
    rf.w += s.kernel.w - 1;
  }
  return rf;
}

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

ConvLayer make_conv(const std::string& name, std::size_t in_channels, std::size_t out_channels, Size2 kernel,
                    bool relu, std::mt19937_64& rng) {
  ConvLayer layer;
  layer.name = name;
  layer.relu = relu;
  layer.params.weight = Tensor(Shape{out_channels, in_channels, kernel.h, kernel.w});
  layer.params.bias = Tensor(Shape{1, out_channels, 1, 1});
  layer.params.padding = Size2{kernel.h / 2, kernel.w / 2};
  const double bound = xavier_bound(layer.params.weight.shape());
  for (auto& w : layer.params.weight.values()) {
    w = static_cast<float>((2.0 * unit_uniform(rng) - 1.0) * bound);
  }
  layer.params.weight.set_requires_grad();
  layer.params.bias.set_requires_grad();
  return layer;
}

std::vector<ConvStage> with_width(const std::vector<Size2>& kernels, std::size_t width) {
  std::vector<ConvStage> out;
  out.reserve(kernels.size());
  for (const auto& k : kernels) out.push_back({k, width});
  return out;
}

MsmsfBlock build_block_with(const MsmsfBlockConfig& config, std::mt19937_64& rng, const std::string& prefix) {
  config.validate();
  std::array<std::vector<ConvLayer>, 4> branches;
  for (std::size_t b = 0; b < 4; ++b) {
    std::size_t in = config.in_channels;
    const auto& stages = config.branches[b].stages;
    for (std::size_t i = 0; i < stages.size(); ++i) {
      branches[b].push_back(make_conv(prefix + ".branch" + std::to_string(b) + ".conv" + std::to_string(i), in,
                                      stages[i].out_channels, stages[i].kernel, false, rng));
      in = stages[i].out_channels;
    }
  }
  std::array<std::vector<ConvLayer>, 2> pair_fusion;
  for (std::size_t p = 0; p < 2; ++p) {
    std::size_t in = config.branches[config.pairs[p][0]].stages.back().out_channels +
                     config.branches[config.pairs[p][1]].stages.back().out_channels;
    const auto& stages = config.pair_fusion[p];
    for (std::size_t i = 0; i < stages.size(); ++i) {
      pair_fusion[p].push_back(make_conv(prefix + ".fuse" + std::to_string(p) + ".conv" + std::to_string(i), in,
                                         stages[i].out_channels, stages[i].kernel, false, rng));
      in = stages[i].out_channels;
    }
  }
  std::vector<ConvLayer> output_fusion;
  std::size_t in = config.pair_fusion[0].back().out_channels + config.pair_fusion[1].back().out_channels;
  for (std::size_t i = 0; i < config.output_fusion.size(); ++i) {
    const bool last = i + 1 == config.output_fusion.size();
    output_fusion.push_back(make_conv(prefix + ".out.conv" + std::to_string(i), in,
                                      config.output_fusion[i].out_channels, config.output_fusion[i].kernel,
                                      last && config.terminal_relu, rng));
    in = config.output_fusion[i].out_channels;
  }
  return MsmsfBlock(config, std::move(branches), std::move(pair_fusion), std::move(output_fusion));
}

Interval clip(Interval iv, std::size_t extent) {
  return {std::max<long>(iv.lo, 0), std::min<long>(iv.hi, static_cast<long>(extent) - 1)};
}

Interval expand(Interval iv, std::size_t half) {
  return {iv.lo - static_cast<long>(half), iv.hi + static_cast<long>(half)};
}

// Pooled indices [lo, hi] of an upsample-by-`factor` output interval, after
// the clamping applied by bilinear_upsample.
Interval upsample_source(Interval iv, std::size_t factor, std::size_t pooled_extent) {
  if (factor == 1) return iv;
  const auto kernel = bilinear_kernel(factor);
  const long k_size = static_cast<long>(kernel.size());
  const long f = static_cast<long>(factor);
  const long pad = (k_size - f) / 2;
  long lo = std::numeric_limits<long>::max();
  long hi = std::numeric_limits<long>::min();
  for (long o = iv.lo; o <= iv.hi; ++o) {
    for (long i = (o + pad) / f;; --i) {
      if (o + pad - i * f >= k_size) break;
      const long c = std::clamp<long>(i, 0, static_cast<long>(pooled_extent) - 1);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
  }
  return {lo, hi};
}

Interval axis_support(const MsmsfNetConfig& cfg, std::size_t extent, std::size_t coord, bool rows) {
  // Extent of the feature map at each stage.
  std::vector<std::size_t> level(cfg.stages.size());
  std::size_t n = extent;
  for (std::size_t s = 0; s < cfg.stages.size(); ++s) {
    level[s] = n;
    if (std::find(cfg.pool_after.begin(), cfg.pool_after.end(), s) != cfg.pool_after.end()) {
      n = conv_output_extent(n, 1, 3, 2);
    }
  }
  auto half = [rows](Size2 rf) { return ((rows ? rf.h : rf.w) - 1) / 2; };

  const Interval fused = clip(expand({static_cast<long>(coord), static_cast<long>(coord)}, cfg.fusion_kernel / 2), extent);
  Interval result{std::numeric_limits<long>::max(), std::numeric_limits<long>::min()};
  for (const std::size_t side_stage : cfg.side_stages) {
    Interval iv = upsample_source(fused, cfg.stage_stride(side_stage), level[side_stage]);
    iv = clip(expand(iv, cfg.side_kernel / 2), level[side_stage]);
    for (long s = static_cast<long>(side_stage); s >= 0; --s) {
      const auto stage = static_cast<std::size_t>(s);
      for (std::size_t b = cfg.stages[stage].blocks; b-- > 0;) {
        iv = clip(expand(iv, half(block_receptive_field(cfg.block_config(stage, b)))), level[stage]);
      }
      if (s > 0 && std::find(cfg.pool_after.begin(), cfg.pool_after.end(), stage - 1) != cfg.pool_after.end()) {
        iv = clip({2 * iv.lo - 1, 2 * iv.hi + 1}, level[stage - 1]);
      }
    }
    result.lo = std::min(result.lo, iv.lo);
    result.hi = std::max(result.hi, iv.hi);
  }
  return result;
}

}  // namespace

Size2 BranchSpec::receptive_field() const { return stack_rf(stages); }

void MsmsfBlockConfig::validate() const {
  if (in_channels == 0) {
    throw ConfigError("msmsfblock: zero input channels");
  }
  Size2 prev{0, 0};
  for (std::size_t b = 0; b < 4; ++b) {
    check_stages(branches[b].stages, "msmsfblock branch " + std::to_string(b), true);
    const Size2 rf = branches[b].receptive_field();
    // Strict in the product order: no axis shrinks and at least one grows.
    if (b > 0 && (rf.h < prev.h || rf.w < prev.w || rf == prev)) {
      throw ConfigError("msmsfblock: branch receptive fields must strictly increase (branch " + std::to_string(b) +
                        ")");
    }
    prev = rf;
  }
  std::set<std::size_t> used;
  for (const auto& pair : pairs) {
    for (const std::size_t b : pair) {
      if (b >= 4 || !used.insert(b).second) {
        throw ConfigError("msmsfblock: fusion pairs must partition the four branches");
      }
    }
  }
  for (std::size_t p = 0; p < 2; ++p) {
    check_stages(pair_fusion[p], "msmsfblock fusion step one, pair " + std::to_string(p), true);
  }
  check_stages(output_fusion, "msmsfblock fusion step two", true);
  if (terminal_relu && !(output_fusion.back().kernel == Size2{3, 1})) {
    throw ConfigError("msmsfblock: the activated terminal convolution must be 3x1");
  }
}

MsmsfBlockConfig MsmsfNetConfig::block_config(std::size_t stage, std::size_t index) const {
  MsmsfBlockConfig cfg;
  const std::size_t width = stages.at(stage).width;
  cfg.in_channels = index > 0 ? width : (stage == 0 ? in_channels : stages[stage - 1].width);
  for (std::size_t b = 0; b < 4; ++b) cfg.branches[b].stages = with_width(block.branches[b], width);
  cfg.pairs = block.pairs;
  cfg.pair_fusion = {with_width(block.pair_fusion, width), with_width(block.pair_fusion, width)};
  cfg.output_fusion = with_width(block.output_fusion, width);
  return cfg;
}

void MsmsfNetConfig::validate() const {
  if (in_channels == 0) throw ConfigError("net: zero input channels");
  if (stages.empty()) throw ConfigError("net: no stages");
  for (std::size_t s = 0; s < stages.size(); ++s) {
    if (stages[s].blocks == 0 || stages[s].width == 0) {
      throw ConfigError("net: stage " + std::to_string(s) + " needs at least one block and a positive width");
    }
  }
  if (pool_after.size() != 2) throw ConfigError("net: exactly two max-pooling layers are required");
  for (std::size_t i = 0; i < pool_after.size(); ++i) {
    if (pool_after[i] + 1 >= stages.size() || (i > 0 && pool_after[i] <= pool_after[i - 1])) {
      throw ConfigError("net: pool positions must be increasing and precede a later stage");
    }
  }
  std::vector<std::size_t> expected = pool_after;
  expected.push_back(stages.size() - 1);
  if (side_stages != expected) {
    throw ConfigError("net: side outputs must attach to the stages before each max-pool and to the final stage");
  }
  if (side_kernel % 2 == 0 || fusion_kernel % 2 == 0) throw ConfigError("net: side/fusion kernels must be odd");
  for (std::size_t s = 0; s < stages.size(); ++s) {
    for (std::size_t b = 0; b < stages[s].blocks; ++b) block_config(s, b).validate();
  }
}

std::size_t MsmsfNetConfig::stage_stride(std::size_t stage) const {
  std::size_t stride = 1;
  for (const std::size_t p : pool_after) {
    if (p < stage) stride *= 2;
  }
  return stride;
}

std::size_t MsmsfNetConfig::min_input_extent() const { return std::size_t{1} << pool_after.size(); }

MsmsfNetConfig MsmsfNetConfig::tiny() {
  MsmsfNetConfig cfg;
  cfg.profile = "tiny";
  cfg.stages = {{1, 8}, {1, 12}, {1, 16}};
  const Size2 row{1, 3};
  const Size2 col{3, 1};
  for (std::size_t b = 0; b < 4; ++b) {
    for (std::size_t i = 0; i <= b; ++i) {
      cfg.block.branches[b].push_back(row);
      cfg.block.branches[b].push_back(col);
    }
  }
  cfg.block.pair_fusion = {row, col};
  cfg.block.output_fusion = {row, col};
  return cfg;
}

MsmsfNetConfig MsmsfNetConfig::paper_depth() {
  MsmsfNetConfig cfg;
  cfg.profile = "paper-depth";
  cfg.stages = {{2, 32}, {2, 64}, {1, 96}};
  for (std::size_t b = 0; b < 4; ++b) {
    const std::size_t n = 3 + 2 * b;
    cfg.block.branches[b] = {Size2{1, n}, Size2{n, 1}};
  }
  cfg.block.pair_fusion = {Size2{1, 3}, Size2{3, 1}};
  cfg.block.output_fusion = {Size2{1, 3}, Size2{3, 1}};
  return cfg;
}

MsmsfNetConfig MsmsfNetConfig::from_profile(const std::string& name) {
  if (name == "tiny") return tiny();
  if (name == "paper-depth") return paper_depth();
  throw ConfigError("unknown net profile '" + name + "' (expected tiny or paper-depth)");
}

Tensor ConvLayer::forward(const Tensor& input) const {
  Tensor out = conv2d(input, params);
  return relu ? msmsf::relu(out) : out;
}

MsmsfBlock::MsmsfBlock(MsmsfBlockConfig config, std::array<std::vector<ConvLayer>, 4> branches,
                       std::array<std::vector<ConvLayer>, 2> pair_fusion, std::vector<ConvLayer> output_fusion)
    : config_(std::move(config)),
      branches_(std::move(branches)),
      pair_fusion_(std::move(pair_fusion)),
      output_fusion_(std::move(output_fusion)) {}

Tensor MsmsfBlock::branch_forward(std::size_t branch, const Tensor& input) const {
  Tensor x = input;
  for (const auto& layer : branches_.at(branch)) x = layer.forward(x);
  return x;
}

Tensor MsmsfBlock::forward(const Tensor& input) const {
  if (input.shape().c != config_.in_channels) {
    throw ConfigError("msmsfblock: expected " + std::to_string(config_.in_channels) + " channels, got input " +
                      input.shape().str());
  }
  std::array<Tensor, 4> branch_out;
  for (std::size_t b = 0; b < 4; ++b) branch_out[b] = branch_forward(b, input);
  std::array<Tensor, 2> fused;
  for (std::size_t p = 0; p < 2; ++p) {
    const std::array<Tensor, 2> pair{branch_out[config_.pairs[p][0]], branch_out[config_.pairs[p][1]]};
    Tensor x = concat_channels<float>(pair);
    for (const auto& layer : pair_fusion_[p]) x = layer.forward(x);
    fused[p] = x;
  }
  Tensor x = concat_channels<float>(fused);
  for (const auto& layer : output_fusion_) x = layer.forward(x);
  return x;
}

void MsmsfBlock::collect(std::vector<NamedParameter>& out) const {
  auto add = [&out](const ConvLayer& layer) {
    out.push_back({layer.name + ".weight", layer.params.weight, 4});
    out.push_back({layer.name + ".bias", layer.params.bias, 1});
  };
  for (const auto& branch : branches_) std::for_each(branch.begin(), branch.end(), add);
  for (const auto& step : pair_fusion_) std::for_each(step.begin(), step.end(), add);
  std::for_each(output_fusion_.begin(), output_fusion_.end(), add);
}

std::size_t MsmsfBlock::weight_layers() const { return count_block_weight_layers(config_); }

MsmsfNet::MsmsfNet(MsmsfNetConfig config, std::vector<std::vector<MsmsfBlock>> stages,
                   std::array<ConvLayer, 3> side_layers, ConvLayer fusion_layer)
    : config_(std::move(config)),
      stages_(std::move(stages)),
      side_layers_(std::move(side_layers)),
      fusion_layer_(std::move(fusion_layer)) {}

NetOutputs MsmsfNet::forward(const Tensor& image) const {
  const Shape& is = image.shape();
  if (is.c != config_.in_channels) {
    throw ConfigError("net expects " + std::to_string(config_.in_channels) + " input channels, got " + is.str());
  }
  const std::size_t min_extent = config_.min_input_extent();
  if (is.h < min_extent || is.w < min_extent) {
    throw DataError("input " + std::to_string(is.h) + "x" + std::to_string(is.w) + " is smaller than the " +
                    std::to_string(min_extent) + "x" + std::to_string(min_extent) + " downsampling footprint");
  }
  NetOutputs out;
  Tensor x = image;
  std::size_t side = 0;
  for (std::size_t s = 0; s < stages_.size(); ++s) {
    for (const auto& block : stages_[s]) x = block.forward(x);
    if (side < 3 && config_.side_stages[side] == s) {
      Tensor logit = side_layers_[side].forward(x);
      const std::size_t factor = config_.stage_stride(s);
      if (factor > 1) {
        logit = crop(bilinear_upsample(logit, factor), is.h, is.w);
      }
      out.sides[side++] = logit;
    }
    if (std::find(config_.pool_after.begin(), config_.pool_after.end(), s) != config_.pool_after.end()) {
      x = maxpool2d(x, 3, 2, 1);
    }
  }
  out.fused = fusion_layer_.forward(concat_channels<float>(out.sides));
  return out;
}

std::vector<NamedParameter> MsmsfNet::parameters() const {
  std::vector<NamedParameter> out;
  for (const auto& stage : stages_) {
    for (const auto& block : stage) block.collect(out);
  }
  for (const auto& layer : side_layers_) {
    out.push_back({layer.name + ".weight", layer.params.weight, 4});
    out.push_back({layer.name + ".bias", layer.params.bias, 1});
  }
  out.push_back({fusion_layer_.name + ".weight", fusion_layer_.params.weight, 4});
  out.push_back({fusion_layer_.name + ".bias", fusion_layer_.params.bias, 1});
  return out;
}

std::size_t conv_weight_count(std::size_t in_channels, std::size_t out_channels, Size2 kernel) {
  return in_channels * out_channels * kernel.h * kernel.w;
}

std::size_t stack_weight_count(std::size_t in_channels, const std::vector<ConvStage>& stages) {
  std::size_t total = 0;
  for (const auto& s : stages) {
    total += conv_weight_count(in_channels, s.out_channels, s.kernel);
    in_channels = s.out_channels;
  }
  return total;
}

double xavier_bound(const Shape& w) {
  const double receptive = static_cast<double>(w.h * w.w);
  const double fan_in = static_cast<double>(w.c) * receptive;
  const double fan_out = static_cast<double>(w.n) * receptive;
  return std::sqrt(6.0 / (fan_in + fan_out));
}

MsmsfBlock build_block(const MsmsfBlockConfig& config, std::uint64_t seed, const std::string& prefix) {
  std::mt19937_64 rng(seed);
  return build_block_with(config, rng, prefix);
}

MsmsfNet build_net(const MsmsfNetConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  std::vector<std::vector<MsmsfBlock>> stages(config.stages.size());
  for (std::size_t s = 0; s < config.stages.size(); ++s) {
    for (std::size_t b = 0; b < config.stages[s].blocks; ++b) {
      stages[s].push_back(build_block_with(config.block_config(s, b), rng,
                                           "stage" + std::to_string(s) + ".block" + std::to_string(b)));
    }
  }
  std::array<ConvLayer, 3> sides;
  const Size2 side_kernel{config.side_kernel, config.side_kernel};
  for (std::size_t m = 0; m < 3; ++m) {
    sides[m] = make_conv("side" + std::to_string(m), config.stages[config.side_stages[m]].width, 1, side_kernel,
                         false, rng);
  }
  ConvLayer fusion = make_conv("fuse", 3, 1, Size2{config.fusion_kernel, config.fusion_kernel}, false, rng);
  return MsmsfNet(config, std::move(stages), std::move(sides), std::move(fusion));
}

std::size_t count_block_weight_layers(const MsmsfBlockConfig& config) {
  std::size_t n = config.output_fusion.size() + config.pair_fusion[0].size() + config.pair_fusion[1].size();
  for (const auto& b : config.branches) n += b.stages.size();
  return n;
}

std::size_t count_weight_layers(const MsmsfNetConfig& config) {
  config.validate();
  std::size_t n = config.side_stages.size() + 1;
  for (std::size_t s = 0; s < config.stages.size(); ++s) {
    for (std::size_t b = 0; b < config.stages[s].blocks; ++b) n += count_block_weight_layers(config.block_config(s, b));
  }
  return n;
}

std::size_t count_parameters(const MsmsfNet& net) {
  std::size_t n = 0;
  for (const auto& p : net.parameters()) n += p.tensor.numel();
  return n;
}

std::size_t count_parameters(const MsmsfNetConfig& config) {
  config.validate();
  auto conv = [](std::size_t in, std::size_t out, Size2 k) { return out * in * k.h * k.w + out; };
  std::size_t n = 0;
  for (std::size_t s = 0; s < config.stages.size(); ++s) {
    for (std::size_t b = 0; b < config.stages[s].blocks; ++b) {
      const auto cfg = config.block_config(s, b);
      for (const auto& branch : cfg.branches) {
        std::size_t in = cfg.in_channels;
        for (const auto& st : branch.stages) {
          n += conv(in, st.out_channels, st.kernel);
          in = st.out_channels;
        }
      }
      for (std::size_t p = 0; p < 2; ++p) {
        std::size_t in = cfg.branches[cfg.pairs[p][0]].stages.back().out_channels +
                         cfg.branches[cfg.pairs[p][1]].stages.back().out_channels;
        for (const auto& st : cfg.pair_fusion[p]) {
          n += conv(in, st.out_channels, st.kernel);
          in = st.out_channels;
        }
      }
      std::size_t in = cfg.pair_fusion[0].back().out_channels + cfg.pair_fusion[1].back().out_channels;
      for (const auto& st : cfg.output_fusion) {
        n += conv(in, st.out_channels, st.kernel);
        in = st.out_channels;
      }
    }
  }
  for (const std::size_t s : config.side_stages) {
    n += conv(config.stages[s].width, 1, Size2{config.side_kernel, config.side_kernel});
  }
  n += conv(config.side_stages.size(), 1, Size2{config.fusion_kernel, config.fusion_kernel});
  return n;
}

Size2 block_receptive_field(const MsmsfBlockConfig& config) {
  Size2 rf{1, 1};
  for (const auto& b : config.branches) {
    const Size2 r = b.receptive_field();
    rf.h = std::max(rf.h, r.h);
    rf.w = std::max(rf.w, r.w);
  }
  const Size2 fuse = stack_rf(config.pair_fusion[0]);
  const Size2 fuse_b = stack_rf(config.pair_fusion[1]);
  const Size2 out = stack_rf(config.output_fusion);
  rf.h += std::max(fuse.h, fuse_b.h) - 1 + out.h - 1;
  rf.w += std::max(fuse.w, fuse_b.w) - 1 + out.w - 1;
  return rf;
}

std::vector<Size2> stage_receptive_fields(const MsmsfNetConfig& config) {
  std::vector<Size2> out;
  Size2 rf{1, 1};
  std::size_t jump = 1;
  for (std::size_t s = 0; s < config.stages.size(); ++s) {
    for (std::size_t b = 0; b < config.stages[s].blocks; ++b) {
      const Size2 r = block_receptive_field(config.block_config(s, b));
      rf.h += (r.h - 1) * jump;
      rf.w += (r.w - 1) * jump;
    }
    out.push_back(rf);
    if (std::find(config.pool_after.begin(), config.pool_after.end(), s) != config.pool_after.end()) {
      rf.h += 2 * jump;
      rf.w += 2 * jump;
      jump *= 2;
    }
  }
  return out;
}

Support fused_output_support(const MsmsfNetConfig& config, Size2 input, std::size_t y, std::size_t x) {
  config.validate();
  return {axis_support(config, input.h, y, true), axis_support(config, input.w, x, false)};
}

}  // namespace msmsf
