#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "grad_harness.hpp"
#include "msmsf/errors.hpp"
#include "msmsf/ops.hpp"
#include "msmsf/tensor.hpp"

namespace msmsf {
namespace {

using testing::gradient_error;
using testing::random_away_from_zero;
using testing::random_distinct;
using testing::random_tensor;

constexpr double kGradTol = 1e-3;

Tensor iota(Shape s) {
  std::vector<float> v(s.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<float>(i + 1);
  return Tensor(s, v);
}

TEST(Tensor, CloneIsIndependentDetachSharesNothingWithHistory) {
  Tensor a(Shape{1, 1, 2, 2}, 1.0f);
  a.set_requires_grad();
  Tensor b = a.clone();
  b.values()[0] = 5.0f;
  EXPECT_EQ(a.values()[0], 1.0f);
  Tensor c = relu(a).detach();
  EXPECT_TRUE(c.is_leaf());
  EXPECT_FALSE(c.requires_grad());
}

TEST(Tensor, BackwardNeedsScalarRoot) {
  Tensor a(Shape{1, 1, 2, 2}, 1.0f);
  a.set_requires_grad();
  EXPECT_THROW(relu(a).backward(), ConfigError);
}

TEST(Tensor, GradientsAccumulateOverReuse) {
  Tensor a(Shape{1, 1, 1, 3}, std::vector<float>{1, 2, 3});
  a.set_requires_grad();
  sum(add(a, a)).backward();
  for (const float g : a.grad()) EXPECT_FLOAT_EQ(g, 2.0f);
  sum(a).backward();
  for (const float g : a.grad()) EXPECT_FLOAT_EQ(g, 3.0f);
  a.zero_grad();
  for (const float g : a.grad()) EXPECT_FLOAT_EQ(g, 0.0f);
}

TEST(Tensor, NoGradGuardRecordsNoHistory) {
  Tensor a(Shape{1, 1, 1, 3}, 1.0f);
  a.set_requires_grad();
  {
    NoGradGuard g;
    EXPECT_FALSE(grad_enabled());
    EXPECT_TRUE(sum(a).is_leaf());
  }
  EXPECT_TRUE(grad_enabled());
  EXPECT_FALSE(sum(a).is_leaf());
}

TEST(Tensor, DiamondGraphBackpropagatesOnce) {
  Tensor64 x(Shape{1, 1, 1, 1}, std::vector<double>{0.3});
  x.set_requires_grad();
  const Tensor64 s = sigmoid(x);
  sum(mul(s, s)).backward();  // d/dx s^2 = 2 s s'
  const double sv = 1.0 / (1.0 + std::exp(-0.3));
  EXPECT_NEAR(x.grad()[0], 2.0 * sv * sv * (1.0 - sv), 1e-12);
}

TEST(Ops, MaxPoolHandExample) {
  const Tensor out = maxpool2d(iota(Shape{1, 1, 4, 4}), 3, 2, 1);
  ASSERT_EQ(out.shape(), (Shape{1, 1, 2, 2}));
  EXPECT_EQ(std::vector<float>(out.values().begin(), out.values().end()), (std::vector<float>{6, 8, 14, 16}));
}

TEST(Ops, MaxPoolTieRoutesGradientToFirstElement) {
  Tensor a(Shape{1, 1, 2, 2}, 7.0f);
  a.set_requires_grad();
  sum(maxpool2d(a, 2, 2, 0)).backward();
  EXPECT_EQ(std::vector<float>(a.grad().begin(), a.grad().end()), (std::vector<float>{1, 0, 0, 0}));
}

TEST(Ops, ConvRowSumsWithZeroPadding) {
  ConvParams p;
  p.weight = Tensor(Shape{1, 1, 1, 3}, 1.0f);
  p.padding = {0, 1};
  const Tensor out = conv2d(Tensor(Shape{1, 1, 1, 3}, 1.0f), p);
  EXPECT_EQ(std::vector<float>(out.values().begin(), out.values().end()), (std::vector<float>{2, 3, 2}));
}

TEST(Ops, ConvMatchesDirectSumWithStrideAndBias) {
  std::mt19937_64 rng(3);
  const Tensor64 x = random_tensor(Shape{2, 3, 7, 6}, rng);
  BasicConvParams<double> p{random_tensor(Shape{4, 3, 3, 2}, rng), random_tensor(Shape{1, 4, 1, 1}, rng), {2, 1}, {1, 0}};
  const Tensor64 y = conv2d(x, p);
  ASSERT_EQ(y.shape(), (Shape{2, 4, 4, 5}));
  for (std::size_t n = 0; n < 2; ++n)
    for (std::size_t o = 0; o < 4; ++o)
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 5; ++j) {
          double acc = p.bias.at(0, o, 0, 0);
          for (std::size_t c = 0; c < 3; ++c)
            for (std::size_t ky = 0; ky < 3; ++ky)
              for (std::size_t kx = 0; kx < 2; ++kx) {
                const long yy = static_cast<long>(2 * i + ky) - 1;
                const long xx = static_cast<long>(j + kx);
                if (yy < 0 || yy >= 7) continue;
                acc += p.weight.at(o, c, ky, kx) * x.at(n, c, static_cast<std::size_t>(yy), static_cast<std::size_t>(xx));
              }
          EXPECT_NEAR(y.at(n, o, i, j), acc, 1e-12);
        }
}

TEST(Ops, ConvRejectsChannelMismatchAndEmptyOutput) {
  ConvParams p;
  p.weight = Tensor(Shape{1, 2, 3, 3}, 1.0f);
  EXPECT_THROW(conv2d(Tensor(Shape{1, 1, 5, 5}), p), ConfigError);
  p.weight = Tensor(Shape{1, 1, 7, 7}, 1.0f);
  EXPECT_THROW(conv2d(Tensor(Shape{1, 1, 5, 5}), p), ConfigError);
}

TEST(Ops, BilinearKernelTaps) {
  EXPECT_EQ(bilinear_kernel(1), (std::vector<double>{1.0}));
  EXPECT_EQ(bilinear_kernel(2), (std::vector<double>{0.25, 0.75, 0.75, 0.25}));
  const auto k4 = bilinear_kernel(4);
  ASSERT_EQ(k4.size(), 8u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(k4[i], k4[7 - i]);
  for (const double w : bilinear_kernel(3)) EXPECT_GT(w, 0.0);
}

// Half-pixel-centre linear interpolation with clamping, written out directly.
double reference_upsample(const Tensor64& x, std::size_t f, std::size_t oy, std::size_t ox) {
  auto coord = [f](std::size_t o, std::size_t n, std::size_t& i0, std::size_t& i1, double& t) {
    double s = (static_cast<double>(o) + 0.5) / static_cast<double>(f) - 0.5;
    s = std::max(s, 0.0);
    i0 = std::min(static_cast<std::size_t>(s), n - 1);
    i1 = std::min(i0 + 1, n - 1);
    t = s - static_cast<double>(i0);
  };
  std::size_t y0, y1, x0, x1;
  double ty, tx;
  coord(oy, x.shape().h, y0, y1, ty);
  coord(ox, x.shape().w, x0, x1, tx);
  const double top = (1 - tx) * x.at(0, 0, y0, x0) + tx * x.at(0, 0, y0, x1);
  const double bot = (1 - tx) * x.at(0, 0, y1, x0) + tx * x.at(0, 0, y1, x1);
  return (1 - ty) * top + ty * bot;
}

TEST(Ops, BilinearUpsampleMatchesHalfPixelInterpolation) {
  std::mt19937_64 rng(11);
  for (const std::size_t f : {2u, 4u}) {
    const Tensor64 x = random_tensor(Shape{1, 1, 3, 5}, rng);
    const Tensor64 y = bilinear_upsample(x, f);
    ASSERT_EQ(y.shape(), (Shape{1, 1, 3 * f, 5 * f}));
    for (std::size_t i = 0; i < 3 * f; ++i)
      for (std::size_t j = 0; j < 5 * f; ++j) EXPECT_NEAR(y.at(0, 0, i, j), reference_upsample(x, f, i, j), 1e-12);
  }
}

TEST(Ops, BilinearUpsampleKeepsConstantsAndIdentity) {
  const Tensor c(Shape{1, 2, 3, 4}, 0.7f);
  const Tensor up = bilinear_upsample(c, 3);
  for (const float v : up.values()) EXPECT_NEAR(v, 0.7f, 1e-6f);
  const Tensor x = iota(Shape{1, 1, 2, 3});
  const Tensor same = bilinear_upsample(x, 1);
  EXPECT_TRUE(std::equal(same.values().begin(), same.values().end(), x.values().begin()));
}

TEST(Ops, ConcatSliceRoundTrip) {
  std::mt19937_64 rng(5);
  const Tensor64 a = random_tensor(Shape{2, 2, 3, 3}, rng);
  const Tensor64 b = random_tensor(Shape{2, 3, 3, 3}, rng);
  const Tensor64 ab[] = {a, b};
  const Tensor64 cat = concat_channels<double>(ab);
  ASSERT_EQ(cat.shape(), (Shape{2, 5, 3, 3}));
  const Tensor64 back = slice_channels(cat, 2, 3);
  EXPECT_TRUE(std::equal(back.values().begin(), back.values().end(), b.values().begin()));
  EXPECT_THROW(slice_channels(cat, 4, 2), ConfigError);
}

TEST(Ops, SigmoidIsStableAtExtremes) {
  const Tensor x(Shape{1, 1, 1, 2}, std::vector<float>{-200.0f, 200.0f});
  const Tensor y = sigmoid(x);
  EXPECT_EQ(y.values()[0], 0.0f);
  EXPECT_EQ(y.values()[1], 1.0f);
}

TEST(Ops, CropKeepsTopLeft) {
  const Tensor x = iota(Shape{1, 1, 3, 3});
  const Tensor y = crop(x, 2, 2);
  EXPECT_EQ(std::vector<float>(y.values().begin(), y.values().end()), (std::vector<float>{1, 2, 4, 5}));
}

// Spot checks; the acceptance suite runs the full 20-sample sweep.
TEST(Gradients, ConvInputWeightBias) {
  std::mt19937_64 rng(21);
  for (const Size2 k : {Size2{3, 3}, Size2{1, 3}, Size2{5, 1}}) {
    const Tensor64 x = random_tensor(Shape{2, 2, 5, 6}, rng);
    BasicConvParams<double> p{random_tensor(Shape{3, 2, k.h, k.w}, rng), random_tensor(Shape{1, 3, 1, 1}, rng), {1, 1},
                              {k.h / 2, k.w / 2}};
    EXPECT_LT(gradient_error([&](const Tensor64& in) { return conv2d(in, p); }, x, rng), kGradTol);
    EXPECT_LT(gradient_error(
                  [&](const Tensor64& w) {
                    auto q = p;
                    q.weight = w;
                    return conv2d(x, q);
                  },
                  p.weight, rng),
              kGradTol);
    EXPECT_LT(gradient_error(
                  [&](const Tensor64& b) {
                    auto q = p;
                    q.bias = b;
                    return conv2d(x, q);
                  },
                  p.bias, rng),
              kGradTol);
  }
}

TEST(Gradients, StridedConv) {
  std::mt19937_64 rng(22);
  BasicConvParams<double> p{random_tensor(Shape{2, 2, 3, 3}, rng), {}, {2, 2}, {1, 1}};
  EXPECT_LT(gradient_error([&](const Tensor64& in) { return conv2d(in, p); }, random_tensor(Shape{1, 2, 7, 6}, rng), rng),
            kGradTol);
}

TEST(Gradients, PoolActivationsUpsampleConcat) {
  std::mt19937_64 rng(23);
  EXPECT_LT(gradient_error([](const Tensor64& in) { return maxpool2d(in); }, random_distinct(Shape{1, 2, 6, 5}, rng), rng),
            kGradTol);
  EXPECT_LT(gradient_error([](const Tensor64& in) { return relu(in); }, random_away_from_zero(Shape{1, 2, 4, 4}, rng), rng),
            kGradTol);
  EXPECT_LT(gradient_error([](const Tensor64& in) { return sigmoid(in); }, random_tensor(Shape{1, 2, 4, 4}, rng, -4, 4), rng),
            kGradTol);
  EXPECT_LT(gradient_error([](const Tensor64& in) { return bilinear_upsample(in, 2); }, random_tensor(Shape{1, 1, 3, 4}, rng),
                           rng),
            kGradTol);
  EXPECT_LT(gradient_error([](const Tensor64& in) { return bilinear_upsample(in, 4); }, random_tensor(Shape{1, 2, 2, 3}, rng),
                           rng),
            kGradTol);
  const Tensor64 other = random_tensor(Shape{1, 3, 3, 3}, rng);
  EXPECT_LT(gradient_error(
                [&](const Tensor64& in) {
                  const Tensor64 parts[] = {other, in};
                  return concat_channels<double>(parts);
                },
                random_tensor(Shape{1, 2, 3, 3}, rng), rng),
            kGradTol);
  EXPECT_LT(gradient_error([](const Tensor64& in) { return crop(in, 2, 3); }, random_tensor(Shape{1, 1, 3, 4}, rng), rng),
            kGradTol);
}

}  // namespace
}  // namespace msmsf
