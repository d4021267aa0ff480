#include "msmsf/edge_eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <queue>

#include "msmsf/errors.hpp"

namespace msmsf {

namespace {

std::size_t reflect(long i, std::size_t n) {
  const long m = static_cast<long>(n);
  if (i < 0) i = -i - 1;
  if (i >= m) i = 2 * m - i - 1;
  return static_cast<std::size_t>(std::clamp<long>(i, 0, m - 1));
}

// Separable triangle filter [1 2 .. r+1 .. 2 1] / (r+1)^2 with symmetric padding.
std::vector<double> triangle_smooth(const Plane<float>& in, std::size_t radius) {
  const std::size_t h = in.h;
  const std::size_t w = in.w;
  std::vector<double> src(in.data.begin(), in.data.end());
  if (radius == 0) return src;
  const long r = static_cast<long>(radius);
  std::vector<double> taps;
  for (long k = -r; k <= r; ++k) taps.push_back(static_cast<double>(r + 1 - std::abs(k)));
  const double norm = static_cast<double>((r + 1) * (r + 1));
  std::vector<double> tmp(h * w);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (long k = -r; k <= r; ++k) acc += taps[static_cast<std::size_t>(k + r)] * src[y * w + reflect(static_cast<long>(x) + k, w)];
      tmp[y * w + x] = acc / norm;
    }
  }
  std::vector<double> out(h * w);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (long k = -r; k <= r; ++k) acc += taps[static_cast<std::size_t>(k + r)] * tmp[reflect(static_cast<long>(y) + k, h) * w + x];
      out[y * w + x] = acc / norm;
    }
  }
  return out;
}

// Central differences inside, one-sided at the border.
void gradient(const std::vector<double>& f, std::size_t h, std::size_t w, std::vector<double>& gx,
              std::vector<double>& gy) {
  gx.assign(h * w, 0.0);
  gy.assign(h * w, 0.0);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      if (w > 1) {
        const std::size_t x0 = x == 0 ? 0 : x - 1;
        const std::size_t x1 = x + 1 == w ? x : x + 1;
        gx[y * w + x] = (f[y * w + x1] - f[y * w + x0]) / static_cast<double>(x1 - x0);
      }
      if (h > 1) {
        const std::size_t y0 = y == 0 ? 0 : y - 1;
        const std::size_t y1 = y + 1 == h ? y : y + 1;
        gy[y * w + x] = (f[y1 * w + x] - f[y0 * w + x]) / static_cast<double>(y1 - y0);
      }
    }
  }
}

double sample_bilinear(const Plane<float>& p, double x, double y) {
  x = std::clamp(x, 0.0, static_cast<double>(p.w - 1));
  y = std::clamp(y, 0.0, static_cast<double>(p.h - 1));
  const auto x0 = static_cast<std::size_t>(x);
  const auto y0 = static_cast<std::size_t>(y);
  const std::size_t x1 = std::min(x0 + 1, p.w - 1);
  const std::size_t y1 = std::min(y0 + 1, p.h - 1);
  const double dx = x - static_cast<double>(x0);
  const double dy = y - static_cast<double>(y0);
  const double top = (1 - dx) * p.at(y0, x0) + dx * p.at(y0, x1);
  const double bottom = (1 - dx) * p.at(y1, x0) + dx * p.at(y1, x1);
  return (1 - dy) * top + dy * bottom;
}

bool nearly_equal(double a, double b) { return std::abs(a - b) <= 1e-7 * std::max(1.0, std::max(std::abs(a), std::abs(b))); }

struct Pixel {
  long y;
  long x;
};

std::vector<Pixel> pixels_of(const BinaryMap& m) {
  std::vector<Pixel> out;
  for (std::size_t y = 0; y < m.h; ++y)
    for (std::size_t x = 0; x < m.w; ++x)
      if (m.at(y, x)) out.push_back({static_cast<long>(y), static_cast<long>(x)});
  return out;
}

// Hopcroft-Karp over adjacency lists of left vertices.
class BipartiteMatcher {
 public:
  BipartiteMatcher(std::size_t left, std::size_t right, std::vector<std::vector<std::size_t>> adj)
      : adj_(std::move(adj)), match_left_(left, kNone), match_right_(right, kNone), dist_(left) {}

  std::size_t run() {
    std::size_t matched = 0;
    while (bfs()) {
      for (std::size_t u = 0; u < adj_.size(); ++u) {
        if (match_left_[u] == kNone && dfs(u)) ++matched;
      }
    }
    return matched;
  }

  bool left_matched(std::size_t u) const { return match_left_[u] != kNone; }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  bool bfs() {
    std::queue<std::size_t> q;
    bool found = false;
    for (std::size_t u = 0; u < adj_.size(); ++u) {
      if (match_left_[u] == kNone) {
        dist_[u] = 0;
        q.push(u);
      } else {
        dist_[u] = kNone;
      }
    }
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      for (const std::size_t v : adj_[u]) {
        const std::size_t next = match_right_[v];
        if (next == kNone) {
          found = true;
        } else if (dist_[next] == kNone) {
          dist_[next] = dist_[u] + 1;
          q.push(next);
        }
      }
    }
    return found;
  }

  bool dfs(std::size_t u) {
    for (const std::size_t v : adj_[u]) {
      const std::size_t next = match_right_[v];
      if (next == kNone || (dist_[next] == dist_[u] + 1 && dfs(next))) {
        match_left_[u] = v;
        match_right_[v] = u;
        return true;
      }
    }
    dist_[u] = kNone;
    return false;
  }

  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::size_t> match_left_;
  std::vector<std::size_t> match_right_;
  std::vector<std::size_t> dist_;
};

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::size_t best_index(const std::vector<ThresholdCounts>& counts) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i].f1() > counts[best].f1()) best = i;
  }
  return best;
}

// Per-image pick for OIS: ties go to the higher threshold, i.e. the fewest
// predictions, so an image with no matches adds no extra false positives.
std::size_t best_image_index(const std::vector<ThresholdCounts>& counts) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i].f1() >= counts[best].f1()) best = i;
  }
  return best;
}

}  // namespace

// --- NMS ---------------------------------------------------------------------

Plane<float> edge_orientation(const EdgeProbabilityMap& prob, std::size_t smoothing_radius) {
  const std::size_t h = prob.height();
  const std::size_t w = prob.width();
  const auto smooth = triangle_smooth(prob.values, smoothing_radius);
  std::vector<double> ox, oy, oxx, oxy_unused, oyx, oyy;
  gradient(smooth, h, w, ox, oy);
  gradient(ox, h, w, oxx, oxy_unused);
  gradient(oy, h, w, oyx, oyy);
  Plane<float> out(h, w);
  for (std::size_t i = 0; i < h * w; ++i) {
    const double a = oxx[i];
    const double b = oyx[i];
    const double c = oyy[i];
    // Major-eigenvector angle, rotated a quarter turn onto the most negative curvature.
    const double major = 0.5 * std::atan2(2.0 * b, a - c);
    double normal = major + std::numbers::pi / 2.0;
    if (normal >= std::numbers::pi) normal -= std::numbers::pi;
    out.data[i] = static_cast<float>(normal);
  }
  return out;
}

EdgeProbabilityMap nms(const EdgeProbabilityMap& prob, const NmsOptions& options) {
  const std::size_t h = prob.height();
  const std::size_t w = prob.width();
  EdgeProbabilityMap out{Plane<float>(h, w, 0.0f)};
  if (h == 0 || w == 0) return out;
  const Plane<float> orient = edge_orientation(prob, options.smoothing_radius);
  const double d = options.neighbor_distance;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double e = prob.values.at(y, x);
      if (e <= 0.0) continue;
      const double cs = std::cos(orient.at(y, x));
      const double sn = std::sin(orient.at(y, x));
      const double fx = static_cast<double>(x);
      const double fy = static_cast<double>(y);
      const double ahead = sample_bilinear(prob.values, fx + d * cs, fy + d * sn);
      const double behind = sample_bilinear(prob.values, fx - d * cs, fy - d * sn);
      const bool tie_ahead = nearly_equal(e, ahead);
      const bool tie_behind = nearly_equal(e, behind);
      if ((!tie_ahead && e < ahead) || (!tie_behind && e < behind) || (tie_ahead && tie_behind)) continue;
      out.values.at(y, x) = static_cast<float>(std::clamp(e * options.attenuation, 0.0, 1.0));
    }
  }
  return out;
}

BinaryMap thin(const BinaryMap& binary) {
  BinaryMap img = binary;
  for (auto& v : img.data) v = v ? 1 : 0;
  const long h = static_cast<long>(img.h);
  const long w = static_cast<long>(img.w);
  auto get = [&](long y, long x) -> int {
    return (y >= 0 && y < h && x >= 0 && x < w) ? img.data[static_cast<std::size_t>(y * w + x)] : 0;
  };
  bool changed = true;
  std::vector<std::size_t> remove;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      remove.clear();
      for (long y = 0; y < h; ++y) {
        for (long x = 0; x < w; ++x) {
          if (!get(y, x)) continue;
          // x1..x8 counter-clockwise from east.
          const int n[9] = {0,           get(y, x + 1),     get(y - 1, x + 1), get(y - 1, x),    get(y - 1, x - 1),
                            get(y, x - 1), get(y + 1, x - 1), get(y + 1, x),     get(y + 1, x + 1)};
          auto nb = [&](int i) { return n[(i - 1) % 8 + 1]; };
          int crossings = 0;
          for (int i = 1; i <= 4; ++i) {
            if (!nb(2 * i - 1) && (nb(2 * i) || nb(2 * i + 1))) ++crossings;
          }
          if (crossings != 1) continue;
          int n1 = 0;
          int n2 = 0;
          for (int k = 1; k <= 4; ++k) {
            n1 += (nb(2 * k - 1) || nb(2 * k)) ? 1 : 0;
            n2 += (nb(2 * k) || nb(2 * k + 1)) ? 1 : 0;
          }
          const int m = std::min(n1, n2);
          if (m < 2 || m > 3) continue;
          const bool g3 = pass == 0 ? ((nb(2) || nb(3) || !nb(8)) && nb(1)) == 0
                                    : ((nb(6) || nb(7) || !nb(4)) && nb(5)) == 0;
          if (g3) remove.push_back(static_cast<std::size_t>(y * w + x));
        }
      }
      for (const std::size_t i : remove) img.data[i] = 0;
      changed = changed || !remove.empty();
    }
  }
  return img;
}

BinaryMap threshold_and_thin(const EdgeProbabilityMap& prob, double t) {
  BinaryMap b(prob.height(), prob.width(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) b.data[i] = prob.values.data[i] >= t ? 1 : 0;
  return thin(b);
}

// --- correspondence ----------------------------------------------------------

std::size_t Correspondence::gt_total_sum() const {
  std::size_t n = 0;
  for (const auto v : gt_total) n += v;
  return n;
}

std::size_t Correspondence::gt_matched_sum() const {
  std::size_t n = 0;
  for (const auto v : gt_matched) n += v;
  return n;
}

std::size_t max_matching(const BinaryMap& a, const BinaryMap& b, double max_distance, BinaryMap* a_matched) {
  if (!a.same_size(b)) throw DataError("matching: maps differ in size");
  const auto pa = pixels_of(a);
  const auto pb = pixels_of(b);
  std::vector<long> index_b(b.size(), -1);
  for (std::size_t j = 0; j < pb.size(); ++j) index_b[static_cast<std::size_t>(pb[j].y) * b.w + static_cast<std::size_t>(pb[j].x)] = static_cast<long>(j);
  const auto r = static_cast<long>(std::floor(max_distance));
  const double d2 = max_distance * max_distance + 1e-9;
  std::vector<std::vector<std::size_t>> adj(pa.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    for (long dy = -r; dy <= r; ++dy) {
      for (long dx = -r; dx <= r; ++dx) {
        if (static_cast<double>(dy * dy + dx * dx) > d2) continue;
        const long y = pa[i].y + dy;
        const long x = pa[i].x + dx;
        if (y < 0 || x < 0 || y >= static_cast<long>(b.h) || x >= static_cast<long>(b.w)) continue;
        const long j = index_b[static_cast<std::size_t>(y) * b.w + static_cast<std::size_t>(x)];
        if (j >= 0) adj[i].push_back(static_cast<std::size_t>(j));
      }
    }
  }
  BipartiteMatcher matcher(pa.size(), pb.size(), std::move(adj));
  const std::size_t matched = matcher.run();
  if (a_matched) {
    for (std::size_t i = 0; i < pa.size(); ++i) {
      if (matcher.left_matched(i)) a_matched->at(static_cast<std::size_t>(pa[i].y), static_cast<std::size_t>(pa[i].x)) = 1;
    }
  }
  return matched;
}

Correspondence correspond(const BinaryMap& pred, const std::vector<BinaryMap>& gts, double tol_frac) {
  if (!(tol_frac > 0.0)) throw ConfigError("match tolerance must be positive");
  const double diag = std::hypot(static_cast<double>(pred.h), static_cast<double>(pred.w));
  const double d = tol_frac * diag;
  Correspondence c;
  c.pred_matched_map = BinaryMap(pred.h, pred.w, 0);
  for (const auto v : pred.data) c.pred_total += v ? 1 : 0;
  for (const auto& gt : gts) {
    if (!gt.same_size(pred)) throw DataError("correspond: ground truth and prediction sizes differ");
    std::size_t total = 0;
    for (const auto v : gt.data) total += v ? 1 : 0;
    c.gt_total.push_back(total);
    c.gt_matched.push_back(max_matching(pred, gt, d, &c.pred_matched_map));
  }
  for (const auto v : c.pred_matched_map.data) c.pred_matched += v;
  return c;
}

// --- evaluation --------------------------------------------------------------

double ThresholdCounts::precision() const {
  return pred_total == 0 ? 0.0 : static_cast<double>(pred_matched) / static_cast<double>(pred_total);
}

double ThresholdCounts::recall() const {
  return gt_total == 0 ? 0.0 : static_cast<double>(gt_matched) / static_cast<double>(gt_total);
}

double ThresholdCounts::f1() const {
  const double p = precision();
  const double r = recall();
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

std::vector<double> default_thresholds() {
  std::vector<double> t;
  for (int k = 1; k <= 99; ++k) t.push_back(k / 100.0);
  return t;
}

std::vector<ThresholdCounts> evaluate_image(const EdgeProbabilityMap& pred, const std::vector<BinaryMap>& gts,
                                            const EvalOptions& options) {
  const auto thresholds = options.thresholds.empty() ? default_thresholds() : options.thresholds;
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > 0.0 && thresholds[i] < 1.0) || (i > 0 && thresholds[i] <= thresholds[i - 1])) {
      throw ConfigError("thresholds must be increasing and inside (0, 1)");
    }
  }
  const EdgeProbabilityMap map = options.apply_nms ? nms(pred, options.nms) : pred;
  std::vector<ThresholdCounts> out;
  for (const double t : thresholds) {
    const Correspondence c = correspond(threshold_and_thin(map, t), gts, options.tol_frac);
    out.push_back({t, c.pred_matched, c.pred_total, c.gt_matched_sum(), c.gt_total_sum()});
  }
  return out;
}

double average_precision(const std::vector<PRPoint>& points) {
  std::vector<std::pair<double, double>> rp;
  for (const auto& p : points) rp.emplace_back(p.recall, p.precision);
  // Ascending recall; equal recalls keep the highest precision.
  std::sort(rp.begin(), rp.end(), [](const auto& a, const auto& b) {
    return a.first < b.first || (a.first == b.first && a.second > b.second);
  });
  rp.erase(std::unique(rp.begin(), rp.end(), [](const auto& a, const auto& b) { return a.first == b.first; }),
           rp.end());
  if (rp.empty()) return 0.0;
  if (rp.front().first > 0.0) rp.insert(rp.begin(), {0.0, rp.front().second});
  double area = 0.0;
  for (std::size_t i = 1; i < rp.size(); ++i) {
    area += (rp[i].first - rp[i - 1].first) * (rp[i].second + rp[i - 1].second) / 2.0;
  }
  return area;
}

EvalResult summarize_counts(std::vector<std::vector<ThresholdCounts>> per_image) {
  if (per_image.empty()) throw DataError("evaluation set is empty");
  const std::size_t nt = per_image.front().size();
  EvalResult r;
  r.totals.resize(nt);
  for (const auto& img : per_image) {
    if (img.size() != nt) throw ConfigError("per-image counts use different threshold sets");
    for (std::size_t t = 0; t < nt; ++t) {
      auto& tot = r.totals[t];
      tot.threshold = img[t].threshold;
      tot.pred_matched += img[t].pred_matched;
      tot.pred_total += img[t].pred_total;
      tot.gt_matched += img[t].gt_matched;
      tot.gt_total += img[t].gt_total;
    }
  }
  if (nt == 0 || r.totals.front().gt_total == 0) {
    throw DataError("no ground-truth edge pixels in the evaluation set; recall is undefined");
  }
  const std::size_t best = best_index(r.totals);
  r.ods = r.totals[best].f1();
  r.ods_threshold = r.totals[best].threshold;

  ThresholdCounts ois;
  for (const auto& img : per_image) {
    const auto& b = img[best_image_index(img)];
    ois.pred_matched += b.pred_matched;
    ois.pred_total += b.pred_total;
    ois.gt_matched += b.gt_matched;
    ois.gt_total += b.gt_total;
  }
  r.ois = ois.f1();

  std::vector<PRPoint> with_predictions;
  for (const auto& t : r.totals) {
    PRPoint p{t.threshold, t.precision(), t.recall(), t.f1()};
    r.curve.points.push_back(p);
    if (t.pred_total > 0) with_predictions.push_back(p);
  }
  r.ap = average_precision(with_predictions);
  r.per_image = std::move(per_image);
  return r;
}

EvalResult evaluate_dataset(const std::vector<EdgeProbabilityMap>& preds,
                            const std::vector<std::vector<BinaryMap>>& gts, const EvalOptions& options) {
  if (preds.empty()) throw DataError("evaluation set is empty");
  if (preds.size() != gts.size()) {
    throw DataError("evaluation: " + std::to_string(preds.size()) + " predictions vs " +
                    std::to_string(gts.size()) + " ground-truth sets");
  }
  std::vector<std::vector<ThresholdCounts>> per_image;
  for (std::size_t i = 0; i < preds.size(); ++i) per_image.push_back(evaluate_image(preds[i], gts[i], options));
  return summarize_counts(std::move(per_image));
}

std::string pr_curves_csv(const std::vector<PRCurve>& curves) {
  std::string out = "name,threshold,recall,precision,f1\n";
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      out += csv_field(c.name) + "," + fmt(p.threshold, "%.4f") + "," + fmt(p.recall) + "," + fmt(p.precision) + "," +
             fmt(p.f1) + "\n";
    }
  }
  return out;
}

std::string pr_curves_svg(const std::vector<PRCurve>& curves) {
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                            "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  const double left = 60, top = 20, size = 400;
  auto px = [&](double r) { return fmt(left + r * size, "%.2f"); };
  auto py = [&](double p) { return fmt(top + (1.0 - p) * size, "%.2f"); };
  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
  s += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  // iso-F1 contours
  for (int k = 1; k <= 9; ++k) {
    const double f = k / 10.0;
    std::string pts;
    for (int i = 0; i <= 100; ++i) {
      const double r = f / 2.0 + (1.0 - f / 2.0) * i / 100.0;
      const double p = f * r / (2.0 * r - f);
      if (p < 0.0 || p > 1.0) continue;
      pts += px(r) + "," + py(p) + " ";
    }
    s += "<polyline fill=\"none\" stroke=\"#dddddd\" stroke-width=\"0.8\" points=\"" + pts + "\"/>\n";
  }
  s += "<rect x=\"" + fmt(left, "%.0f") + "\" y=\"" + fmt(top, "%.0f") + "\" width=\"400\" height=\"400\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 10; ++k) {
    const double v = k / 10.0;
    s += "<text x=\"" + px(v) + "\" y=\"" + fmt(top + size + 16, "%.0f") + "\" font-size=\"10\" text-anchor=\"middle\">" +
         fmt(v, "%.1f") + "</text>\n";
    s += "<text x=\"" + fmt(left - 6, "%.0f") + "\" y=\"" + py(v) + "\" font-size=\"10\" text-anchor=\"end\">" +
         fmt(v, "%.1f") + "</text>\n";
  }
  s += "<text x=\"" + px(0.5) + "\" y=\"" + fmt(top + size + 34, "%.0f") + "\" font-size=\"12\" text-anchor=\"middle\">Recall</text>\n";
  s += "<text x=\"14\" y=\"" + py(0.5) + "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 " + py(0.5) +
       ")\">Precision</text>\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const char* color = kColors[i % std::size(kColors)];
    std::string pts;
    for (const auto& p : curves[i].points) {
      if (p.precision == 0.0 && p.recall == 0.0) continue;
      pts += px(p.recall) + "," + py(p.precision) + " ";
    }
    s += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    const std::string ly = fmt(top + 14 + 16.0 * static_cast<double>(i), "%.0f");
    s += "<line x1=\"475\" y1=\"" + ly + "\" x2=\"495\" y2=\"" + ly + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"500\" y=\"" + ly + "\" font-size=\"11\" dominant-baseline=\"middle\">" + xml_escape(curves[i].name) +
         "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

void emit_pr_plot(const std::vector<PRCurve>& curves, const std::filesystem::path& stem) {
  if (curves.empty()) throw ConfigError("emit_pr_plot: no curves");
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
    if (!out) throw DataError("failed writing " + path.string());
  };
  auto csv = stem;
  csv += ".csv";
  auto svg = stem;
  svg += ".svg";
  write(csv, pr_curves_csv(curves));
  write(svg, pr_curves_svg(curves));
}

}  // namespace msmsf
