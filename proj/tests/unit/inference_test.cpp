#include <gtest/gtest.h>

#include <random>

#include "msmsf/errors.hpp"
#include "msmsf/inference.hpp"
#include "msmsf/synthetic.hpp"
#include "msmsf/trainer.hpp"

namespace msmsf {
namespace {

Image random_image(std::size_t h, std::size_t w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> d(0, 1);
  Image img(3, h, w);
  for (auto& v : img.data) v = d(rng);
  return img;
}

TEST(Predict, ZeroParametersGiveOneHalf) {
  MsmsfNet net = build_net(MsmsfNetConfig::tiny(), 1);
  for (auto& p : net.parameters())
    for (auto& v : p.tensor.values()) v = 0.0f;
  const Prediction p = predict_all(net, random_image(9, 14, 2));
  for (const float v : p.fused.values.data) EXPECT_EQ(v, 0.5f);
  for (const auto& s : p.sides)
    for (const float v : s.values.data) EXPECT_EQ(v, 0.5f);
}

TEST(Predict, RangeAndSizeAndTooSmallInput) {
  const MsmsfNet net = build_net(MsmsfNetConfig::tiny(), 3);
  const EdgeProbabilityMap m = predict(net, random_image(11, 6, 4));
  EXPECT_EQ(m.height(), 11u);
  EXPECT_EQ(m.width(), 6u);
  for (const float v : m.values.data) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
  }
  EXPECT_THROW(predict(net, random_image(2, 9, 1)), DataError);
}

TEST(Multiscale, SingleUnitScaleIsBitExact) {
  const MsmsfNet net = build_net(MsmsfNetConfig::tiny(), 5);
  const Image img = random_image(17, 13, 6);
  EXPECT_EQ(multiscale_predict(net, img, {1.0}), predict(net, img));
}

TEST(Multiscale, IsMeanOfResizedPredictions) {
  const MsmsfNet net = build_net(MsmsfNetConfig::tiny(), 7);
  const Image img = random_image(15, 12, 8);
  const EdgeProbabilityMap ms = multiscale_predict(net, img);
  const std::size_t sizes[3][2] = {{8, 6}, {15, 12}, {23, 18}};  // round half up
  std::vector<double> acc(img.h * img.w, 0.0);
  for (const auto& s : sizes) {
    EdgeProbabilityMap p = predict(net, resize_bilinear(img, s[0], s[1]));
    const Plane<float> back = resize_bilinear(p.values, img.h, img.w);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += back.data[i];
  }
  for (std::size_t i = 0; i < acc.size(); ++i) {
    EXPECT_NEAR(ms.values.data[i], acc[i] / 3.0, 1e-6);
    EXPECT_GE(ms.values.data[i], 0.0f);
    EXPECT_LE(ms.values.data[i], 1.0f);
  }
  EXPECT_THROW(multiscale_predict(net, img, {0.5, 0.0}), ConfigError);
  EXPECT_THROW(multiscale_predict(net, img, {}), ConfigError);
}

TEST(Multiscale, ScaledExtentRounding) {
  EXPECT_EQ(scaled_extent(5, 0.5, 1), 3u);
  EXPECT_EQ(scaled_extent(15, 1.5, 1), 23u);
  EXPECT_EQ(scaled_extent(3, 0.5, 4), 4u);
  EXPECT_EQ(scaled_extent(1, 0.1, 0), 1u);
}

TEST(Resize, SameSizeIsIdentityAndConstantsStayConstant) {
  const Image img = random_image(5, 7, 9);
  EXPECT_EQ(resize_bilinear(img, 5, 7), img);
  const Plane<float> c(4, 4, 0.25f);
  for (const float v : resize_bilinear(c, 9, 3).data) EXPECT_FLOAT_EQ(v, 0.25f);
}

TEST(ModalityAverage, Definition) {
  EdgeProbabilityMap zero{Plane<float>(3, 2, 0.0f)};
  EdgeProbabilityMap one{Plane<float>(3, 2, 1.0f)};
  for (const float v : modality_average(zero, one).values.data) EXPECT_EQ(v, 0.5f);
  EdgeProbabilityMap a{Plane<float>(2, 2)};
  a.values.data = {0.1f, 0.2f, 0.3f, 0.9f};
  EXPECT_EQ(modality_average(a, a), a);
  const EdgeProbabilityMap ones{Plane<float>(2, 2, 1.0f)};
  EXPECT_EQ(modality_average(a, ones), modality_average(ones, a));
  EXPECT_THROW(modality_average(a, one), DataError);
}

TEST(Predict, FusedDiffersFromSidesAfterTraining) {
  std::vector<TrainingSample> samples;
  for (std::uint64_t i = 0; i < 2; ++i) {
    const SyntheticSample s = make_synthetic_sample(i, 16, 16);
    samples.push_back({"s", s.image, TriStateGroundTruth::from_binary(s.edges)});
  }
  MsmsfNet net = build_net(MsmsfNetConfig::tiny(), 2);
  TrainConfig cfg = TrainConfig::for_profile(DatasetProfile::biped);
  cfg.crop = {16, 16};
  cfg.max_steps = 5;
  cfg.schedule.initial_lr = 1e-3;
  train(samples, net, cfg);
  const Prediction p = predict_all(net, samples[0].image);
  for (const auto& side : p.sides) EXPECT_NE(side, p.fused);
}

}  // namespace
}  // namespace msmsf
