#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "msmsf/image.hpp"
#include "msmsf/inference.hpp"

namespace msmsf {

// --- non-maximum suppression and thinning --------------------------------

struct NmsOptions {
  // Radius of the triangle filter applied before orientation estimation.
  std::size_t smoothing_radius = 4;
  // Distance of the two neighbours sampled along the edge normal.
  double neighbor_distance = 1.0;
  // Retained pixels are multiplied by this factor.
  double attenuation = 1.0;
};

/// Per-pixel edge-normal angle (radians) from the eigen-decomposition of the
/// Hessian of the triangle-smoothed map.
Plane<float> edge_orientation(const EdgeProbabilityMap& prob, std::size_t smoothing_radius = 4);

/// Keeps pixels that are maximal along their edge normal (neighbours sampled
/// bilinearly); pixels tied with both neighbours (plateaus) are suppressed.
EdgeProbabilityMap nms(const EdgeProbabilityMap& prob, const NmsOptions& options = {});

/// Boundary-peeling thinning (two sub-iterations per pass, connectivity
/// preserving) until no pixel changes.
BinaryMap thin(const BinaryMap& binary);

/// (prob >= t) followed by thin().
BinaryMap threshold_and_thin(const EdgeProbabilityMap& prob, double t);

// --- correspondence -------------------------------------------------------

struct Correspondence {
  std::size_t pred_total = 0;
  // Prediction pixels matched to at least one annotator.
  std::size_t pred_matched = 0;
  std::vector<std::size_t> gt_total;
  std::vector<std::size_t> gt_matched;
  BinaryMap pred_matched_map;

  std::size_t gt_total_sum() const;
  std::size_t gt_matched_sum() const;
};

/// Maximum-cardinality bipartite matching per annotator, pairing pixels at
/// Euclidean distance <= tol_frac * image diagonal.
Correspondence correspond(const BinaryMap& pred, const std::vector<BinaryMap>& gts, double tol_frac);

/// Size of a maximum matching between two point sets under a distance bound.
std::size_t max_matching(const BinaryMap& a, const BinaryMap& b, double max_distance, BinaryMap* a_matched = nullptr);

// --- dataset evaluation ---------------------------------------------------

inline constexpr double kDefaultTolerance = 0.0075;
inline constexpr double kNyudTolerance = 0.011;

struct ThresholdCounts {
  double threshold = 0.0;
  std::size_t pred_matched = 0;
  std::size_t pred_total = 0;
  std::size_t gt_matched = 0;
  std::size_t gt_total = 0;

  double precision() const;
  double recall() const;
  double f1() const;
};

struct PRPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct PRCurve {
  std::string name;
  std::vector<PRPoint> points;
};

struct EvalOptions {
  std::vector<double> thresholds;  // empty -> k/100, k = 1..99
  double tol_frac = kDefaultTolerance;
  bool apply_nms = true;
  NmsOptions nms;
};

struct EvalResult {
  double ods = 0.0;
  double ods_threshold = 0.0;
  double ois = 0.0;
  double ap = 0.0;
  PRCurve curve;
  // [image][threshold]
  std::vector<std::vector<ThresholdCounts>> per_image;
  std::vector<ThresholdCounts> totals;
};

std::vector<double> default_thresholds();

/// Counts for one image at every threshold.
std::vector<ThresholdCounts> evaluate_image(const EdgeProbabilityMap& pred, const std::vector<BinaryMap>& gts,
                                            const EvalOptions& options);

/// ODS (best F1 of dataset-summed counts over one threshold), OIS (F1 of the
/// sum of each image's best-threshold counts, ties to the higher threshold), AP (trapezoid over recall of
/// the swept points, duplicates keep the highest precision, a zero-recall
/// point with the first precision prepended) and the PR curve.
EvalResult evaluate_dataset(const std::vector<EdgeProbabilityMap>& preds,
                            const std::vector<std::vector<BinaryMap>>& gts, const EvalOptions& options = {});

/// Aggregates already computed per-image counts (all with the same thresholds).
EvalResult summarize_counts(std::vector<std::vector<ThresholdCounts>> per_image);

double average_precision(const std::vector<PRPoint>& points);

/// Writes <stem>.csv and <stem>.svg; output bytes depend only on the input.
void emit_pr_plot(const std::vector<PRCurve>& curves, const std::filesystem::path& stem);
std::string pr_curves_csv(const std::vector<PRCurve>& curves);
std::string pr_curves_svg(const std::vector<PRCurve>& curves);

}  // namespace msmsf
