#include "msmsf/ground_truth.hpp"

#include "msmsf/errors.hpp"

namespace msmsf {

double ClassCounts::lambda() const {
  if (labeled() == 0) throw DataError("class balance undefined: every pixel is ignored");
  return static_cast<double>(negatives) / static_cast<double>(labeled());
}

ClassCounts TriStateGroundTruth::counts() const {
  ClassCounts c;
  for (const Label l : labels.data) {
    switch (l) {
      case Label::positive: ++c.positives; break;
      case Label::negative: ++c.negatives; break;
      case Label::ignore: ++c.ignored; break;
    }
  }
  return c;
}

BinaryMap TriStateGroundTruth::positives() const {
  BinaryMap out(labels.h, labels.w, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) out.data[i] = labels.data[i] == Label::positive ? 1 : 0;
  return out;
}

TriStateGroundTruth TriStateGroundTruth::from_binary(const BinaryMap& edges) {
  TriStateGroundTruth gt(edges.h, edges.w);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    gt.labels.data[i] = edges.data[i] ? Label::positive : Label::negative;
  }
  return gt;
}

TriStateGroundTruth consensus_gt(std::span<const BinaryMap> annotations, std::size_t k) {
  if (annotations.empty()) throw DataError("consensus_gt: no annotations");
  if (k == 0) throw ConfigError("consensus_gt: k must be at least 1");
  const BinaryMap& first = annotations.front();
  for (const auto& a : annotations) {
    if (!a.same_size(first)) throw DataError("consensus_gt: annotations differ in size");
  }
  TriStateGroundTruth gt(first.h, first.w);
  for (std::size_t i = 0; i < first.size(); ++i) {
    std::size_t votes = 0;
    for (const auto& a : annotations) votes += a.data[i] ? 1 : 0;
    gt.labels.data[i] = votes >= k ? Label::positive : (votes == 0 ? Label::negative : Label::ignore);
  }
  return gt;
}

}  // namespace msmsf
