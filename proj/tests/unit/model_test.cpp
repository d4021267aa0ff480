#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <set>

#include "msmsf/checkpoint.hpp"
#include "msmsf/errors.hpp"
#include "msmsf/model.hpp"

namespace msmsf {
namespace {

MsmsfBlockConfig toy_block(std::size_t in, std::size_t width) {
  MsmsfBlockConfig cfg;
  cfg.in_channels = in;
  for (std::size_t b = 0; b < 4; ++b) cfg.branches[b].stages = {{Size2{1, 3 + 2 * b}, width}};
  cfg.pair_fusion = {std::vector<ConvStage>{{Size2{1, 3}, width}}, std::vector<ConvStage>{{Size2{1, 3}, width}}};
  cfg.output_fusion = {{Size2{3, 1}, width}};
  return cfg;
}

TEST(Accounting, ToyBlockHandCount) {
  // 4 branch convs + 2 step-one convs + terminal 3x1.
  EXPECT_EQ(count_block_weight_layers(toy_block(3, 4)), 7u);
  // One block, one side conv and the fusion conv.
  EXPECT_EQ(count_block_weight_layers(toy_block(3, 4)) + 1 + 1, 9u);
}

TEST(Accounting, ToyBlockParameterHandCount) {
  const MsmsfBlockConfig cfg = toy_block(2, 3);
  const MsmsfBlock block = build_block(cfg, 1);
  std::vector<NamedParameter> params;
  block.collect(params);
  std::size_t total = 0;
  for (const auto& p : params) total += p.tensor.numel();
  // branches 2*3*(3+5+7+9) + 4*3, step one 2*(6*3*3 + 3), step two 6*3*3 + 3
  EXPECT_EQ(total, 144u + 12u + 114u + 57u);
}

TEST(Accounting, ProfilesAndAdditivity) {
  EXPECT_EQ(count_weight_layers(MsmsfNetConfig::paper_depth()), 74u);
  MsmsfNetConfig tiny = MsmsfNetConfig::tiny();
  EXPECT_EQ(count_weight_layers(tiny), 3u * 26u + 4u);
  const std::size_t per_block = count_block_weight_layers(tiny.block_config(1, 1 % tiny.stages[1].blocks));
  tiny.stages[1].blocks += 2;
  EXPECT_EQ(count_weight_layers(tiny), 3u * 26u + 4u + 2u * per_block);
}

TEST(Accounting, FactorizedPairIsTwoThirdsOfSquare) {
  for (const std::size_t c : {4u, 16u, 64u}) {
    const std::size_t pair = stack_weight_count(c, {{Size2{1, 3}, c}, {Size2{3, 1}, c}});
    const std::size_t square = conv_weight_count(c, c, Size2{3, 3});
    EXPECT_EQ(3 * pair, 2 * square);
  }
}

TEST(Accounting, ParameterCountsAgree) {
  for (const auto& cfg : {MsmsfNetConfig::tiny(), MsmsfNetConfig::paper_depth()}) {
    EXPECT_EQ(count_parameters(build_net(cfg, 3)), count_parameters(cfg));
  }
}

TEST(Config, RejectsStructuralViolations) {
  MsmsfBlockConfig cfg = toy_block(3, 4);
  cfg.branches[2].stages[0].kernel = {3, 3};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = toy_block(3, 4);
  std::swap(cfg.branches[1], cfg.branches[2]);
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = toy_block(3, 4);
  cfg.output_fusion.back().kernel = {1, 3};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = toy_block(0, 4);
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = toy_block(3, 0);
  EXPECT_THROW(build_block(cfg, 0), ConfigError);

  MsmsfNetConfig net = MsmsfNetConfig::tiny();
  net.side_stages = {0, 2};
  EXPECT_THROW(net.validate(), ConfigError);
  net = MsmsfNetConfig::tiny();
  net.pool_after = {0};
  EXPECT_THROW(net.validate(), ConfigError);
  EXPECT_THROW(MsmsfNetConfig::from_profile("huge"), ConfigError);
}

TEST(Init, XavierBoundZeroBiasAndDeterminism) {
  const MsmsfNet a = build_net(MsmsfNetConfig::tiny(), 42);
  const MsmsfNet b = build_net(MsmsfNetConfig::tiny(), 42);
  const MsmsfNet c = build_net(MsmsfNetConfig::tiny(), 43);
  const auto pa = a.parameters();
  const auto pb = b.parameters();
  const auto pc = c.parameters();
  ASSERT_EQ(pa.size(), pb.size());
  double sum = 0.0;
  std::size_t n = 0;
  bool any_diff = false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(pa[i].name, pb[i].name);
    EXPECT_TRUE(std::equal(pa[i].tensor.values().begin(), pa[i].tensor.values().end(), pb[i].tensor.values().begin()));
    any_diff = any_diff || !std::equal(pa[i].tensor.values().begin(), pa[i].tensor.values().end(),
                                       pc[i].tensor.values().begin());
    if (pa[i].rank == 1) {
      for (const float v : pa[i].tensor.values()) EXPECT_EQ(v, 0.0f);
      continue;
    }
    const double bound = xavier_bound(pa[i].tensor.shape());
    for (const float v : pa[i].tensor.values()) {
      EXPECT_LE(std::abs(v), bound);
      sum += v / bound;  // U(-1, 1) after scaling
      ++n;
    }
  }
  EXPECT_TRUE(any_diff);
  ASSERT_GE(n, 10000u);
  const double se = std::sqrt(1.0 / 3.0 / static_cast<double>(n));
  EXPECT_LT(std::abs(sum / static_cast<double>(n)), 3.0 * se);
}

TEST(Init, XavierBoundFormula) {
  // fan_in = 4*1*3, fan_out = 5*1*3
  EXPECT_DOUBLE_EQ(xavier_bound(Shape{5, 4, 1, 3}), std::sqrt(6.0 / 27.0));
}

TEST(Block, PreservesResolutionAndMapsZeroToZero) {
  const MsmsfBlock block = build_block(MsmsfNetConfig::tiny().block_config(0, 0), 5);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<float> d(-1, 1);
  for (const Size2 s : {Size2{7, 5}, Size2{1, 1}, Size2{16, 9}}) {
    Tensor x(Shape{2, 3, s.h, s.w});
    for (auto& v : x.values()) v = d(rng);
    const Tensor y = block.forward(x);
    EXPECT_EQ(y.shape(), (Shape{2, 8, s.h, s.w}));
    for (const float v : y.values()) EXPECT_GE(v, 0.0f);
  }
  const Tensor zero = block.forward(Tensor(Shape{1, 3, 6, 6}));
  for (const float v : zero.values()) EXPECT_EQ(v, 0.0f);
  EXPECT_THROW(block.forward(Tensor(Shape{1, 4, 6, 6})), ConfigError);
}

// Positive weights rule out cancellation, so the nonzero footprint of an
// impulse is exactly the influence region.
void make_weights_positive(std::vector<NamedParameter> params) {
  for (auto& p : params) {
    if (p.rank == 1) continue;
    const float w = 1.0f / static_cast<float>(p.tensor.shape().c * p.tensor.shape().h * p.tensor.shape().w);
    for (auto& v : p.tensor.values()) v = w;
  }
}

TEST(Block, BranchImpulseSupportMatchesReceptiveField) {
  const MsmsfBlockConfig cfg = MsmsfNetConfig::tiny().block_config(0, 0);
  MsmsfBlock block = build_block(cfg, 9);
  std::vector<NamedParameter> params;
  block.collect(params);
  make_weights_positive(params);
  const std::size_t size = 21;
  const std::size_t mid = size / 2;
  Tensor impulse(Shape{1, 3, size, size});
  for (std::size_t c = 0; c < 3; ++c) impulse.at(0, c, mid, mid) = 1.0f;
  for (std::size_t b = 0; b < 4; ++b) {
    const Tensor out = block.branch_forward(b, impulse);
    const Size2 rf = cfg.branches[b].receptive_field();
    EXPECT_EQ(rf, (Size2{3 + 2 * b, 3 + 2 * b}));
    for (std::size_t y = 0; y < size; ++y)
      for (std::size_t x = 0; x < size; ++x) {
        const bool inside = std::abs(static_cast<long>(y) - static_cast<long>(mid)) <= static_cast<long>(rf.h / 2) &&
                            std::abs(static_cast<long>(x) - static_cast<long>(mid)) <= static_cast<long>(rf.w / 2);
        EXPECT_EQ(out.at(0, 0, y, x) > 0.0f, inside) << "branch " << b << " at " << y << "," << x;
      }
  }
  EXPECT_EQ(block_receptive_field(cfg), (Size2{13, 13}));
}

TEST(Net, OutputsAtInputResolution) {
  const MsmsfNet net = build_net(MsmsfNetConfig::tiny(), 1);
  for (const Size2 s : {Size2{4, 4}, Size2{13, 7}, Size2{32, 33}}) {
    const NetOutputs out = net.forward(Tensor(Shape{1, 3, s.h, s.w}, 0.5f));
    for (const auto& side : out.sides) EXPECT_EQ(side.shape(), (Shape{1, 1, s.h, s.w}));
    EXPECT_EQ(out.fused.shape(), (Shape{1, 1, s.h, s.w}));
  }
  EXPECT_EQ(net.config().stage_stride(0), 1u);
  EXPECT_THROW(net.forward(Tensor(Shape{1, 3, 3, 8})), DataError);
}

TEST(Net, ImpulseFootprintEqualsComposedSupport) {
  const MsmsfNetConfig cfg = MsmsfNetConfig::tiny();
  MsmsfNet net = build_net(cfg, 2);
  make_weights_positive(net.parameters());
  const Size2 input{41, 38};
  for (const auto& [py, px] : {std::pair<std::size_t, std::size_t>{20, 19}, {0, 0}, {40, 37}, {3, 30}}) {
    Tensor impulse(Shape{1, 3, input.h, input.w});
    for (std::size_t c = 0; c < 3; ++c) impulse.at(0, c, py, px) = 1.0f;
    const Tensor fused = net.forward(impulse).fused;
    std::size_t mismatches = 0;
    for (std::size_t y = 0; y < input.h; ++y)
      for (std::size_t x = 0; x < input.w; ++x) {
        const Support s = fused_output_support(cfg, input, y, x);
        const bool inside = static_cast<long>(py) >= s.rows.lo && static_cast<long>(py) <= s.rows.hi &&
                            static_cast<long>(px) >= s.cols.lo && static_cast<long>(px) <= s.cols.hi;
        mismatches += (fused.at(0, 0, y, x) > 0.0f) != inside ? 1 : 0;
      }
    EXPECT_EQ(mismatches, 0u) << "impulse at " << py << "," << px;
  }
}

TEST(Checkpoint, RoundTripIsBitExactAndPreservesForward) {
  const MsmsfNetConfig cfg = MsmsfNetConfig::tiny();
  const MsmsfNet net = build_net(cfg, 17);
  const auto bytes = encode_checkpoint(to_checkpoint(net));
  const Checkpoint back = decode_checkpoint(bytes);
  EXPECT_EQ(encode_checkpoint(back), bytes);

  MsmsfNet other = build_net(cfg, 18);
  load_parameters(other, back);
  const auto pa = net.parameters();
  const auto pb = other.parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(std::memcmp(pa[i].tensor.values().data(), pb[i].tensor.values().data(), pa[i].tensor.numel() * sizeof(float)), 0);
  }
  Tensor x(Shape{1, 3, 12, 10});
  std::mt19937_64 rng(4);
  for (auto& v : x.values()) v = static_cast<float>(rng() % 1000) / 1000.0f;
  const Tensor ya = net.forward(x).fused;
  const Tensor yb = other.forward(x).fused;
  EXPECT_TRUE(std::equal(ya.values().begin(), ya.values().end(), yb.values().begin()));
}

TEST(Checkpoint, NamesAreUniqueAndDeterministic) {
  const auto a = build_net(MsmsfNetConfig::paper_depth(), 1).parameters();
  const auto b = build_net(MsmsfNetConfig::paper_depth(), 2).parameters();
  std::set<std::string> names;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(names.insert(a[i].name).second) << a[i].name;
    EXPECT_EQ(a[i].name, b[i].name);
  }
}

TEST(Checkpoint, RejectsCorruptionVersionAndMismatch) {
  const MsmsfNet net = build_net(MsmsfNetConfig::tiny(), 1);
  auto bytes = encode_checkpoint(to_checkpoint(net));
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(decode_checkpoint(bad), DataError);
  bad = bytes;
  bad[5] = '2';
  try {
    decode_checkpoint(bad);
    FAIL() << "version mismatch accepted";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }
  bad = bytes;
  bad.resize(bytes.size() - 3);
  EXPECT_THROW(decode_checkpoint(bad), DataError);

  MsmsfNetConfig wider = MsmsfNetConfig::tiny();
  wider.stages[2].width = 20;
  MsmsfNet target = build_net(wider, 1);
  try {
    load_parameters(target, decode_checkpoint(bytes));
    FAIL() << "shape mismatch accepted";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("stage2"), std::string::npos) << e.what();
  }
}

}  // namespace
}  // namespace msmsf
