#pragma once

#include "vesselaug/image.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vesselaug {

/// A probability map with its ground truth and optional field-of-view mask.
/// Only pixels where the mask is 1 are evaluated.
struct EvalPair {
  FloatPlane prediction;
  BinaryPlane truth;
  std::optional<BinaryPlane> fov;
  std::string id;
};

/// Throws std::invalid_argument on size mismatch, non-binary masks or
/// predictions outside [0,1].
void validate(const EvalPair& pair);

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// prediction >= t is a positive call.
ConfusionCounts confusion_at_threshold(const EvalPair& pair, double t);

/// Metrics whose denominator is zero are left empty ("undefined").
struct BinaryMetrics {
  std::optional<double> acc;
  std::optional<double> sp;
  std::optional<double> se;
  std::optional<double> f1;
};

BinaryMetrics binary_metrics(const ConfusionCounts& counts);

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  double auc = 0.0;
  /// From (0,0) to (1,1), one point per distinct score, thresholds descending.
  std::vector<RocPoint> points;
  std::uint64_t positives = 0;
  std::uint64_t negatives = 0;
};

struct ScoredLabel {
  double score = 0.0;
  bool positive = false;
};

/// Exact AUC: the Mann-Whitney U statistic over all positive/negative pairs,
/// ties counted one half. Throws if either class is absent.
RocCurve roc_auc(std::vector<ScoredLabel> samples);
RocCurve roc_auc(const EvalPair& pair);

/// In-mask (score, label) pairs in row-major order.
std::vector<ScoredLabel> gather_scores(const EvalPair& pair);

/// Trapezoidal area under a polyline of ROC points.
double trapezoid_area(std::span<const RocPoint> points);

inline constexpr double kDefaultThreshold = 0.5;

struct MetricsReport {
  std::string id;
  std::optional<double> auc;
  BinaryMetrics binary;
  double threshold = kDefaultThreshold;
  ConfusionCounts counts;
  std::vector<RocPoint> roc;
  std::uint64_t pixels = 0;
};

/// Single pair. AUC is left empty when the truth has a single class.
MetricsReport evaluate_pair(const EvalPair& pair, double threshold = kDefaultThreshold);

enum class Aggregation { Pooled, PerImageMean };

struct DatasetReport {
  /// Every in-mask pixel of every image concatenated, metrics computed once.
  MetricsReport pooled;
  /// Mean over images of each metric, skipping images where it is undefined.
  MetricsReport mean;
  std::vector<MetricsReport> per_image;

  const MetricsReport& summary(Aggregation a) const {
    return a == Aggregation::Pooled ? pooled : mean;
  }
};

DatasetReport evaluate_dataset(std::span<const EvalPair> pairs,
                               double threshold = kDefaultThreshold);

}  // namespace vesselaug
