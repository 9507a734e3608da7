#include "vesselaug/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace vesselaug {

namespace {

bool is_binary(const BinaryPlane& p) { return (p <= 1).all(); }

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

template <typename Fn>
void for_each_in_mask(const EvalPair& pair, Fn&& fn) {
  const Eigen::Index h = pair.truth.rows();
  const Eigen::Index w = pair.truth.cols();
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      if (pair.fov && (*pair.fov)(y, x) == 0) continue;
      fn(pair.prediction(y, x), pair.truth(y, x) != 0);
    }
  }
}

}  // namespace

void validate(const EvalPair& pair) {
  const auto where = pair.id.empty() ? std::string() : " (" + pair.id + ")";
  if (pair.prediction.rows() != pair.truth.rows() || pair.prediction.cols() != pair.truth.cols()) {
    throw std::invalid_argument("prediction and truth dimensions differ" + where);
  }
  if (pair.fov && (pair.fov->rows() != pair.truth.rows() || pair.fov->cols() != pair.truth.cols())) {
    throw std::invalid_argument("fov mask and truth dimensions differ" + where);
  }
  if (!is_binary(pair.truth)) throw std::invalid_argument("truth is not binary" + where);
  if (pair.fov && !is_binary(*pair.fov)) throw std::invalid_argument("fov mask is not binary" + where);
  if (!(pair.prediction >= 0.0).all() || !(pair.prediction <= 1.0).all()) {
    throw std::invalid_argument("prediction values outside [0,1]" + where);
  }
}

ConfusionCounts confusion_at_threshold(const EvalPair& pair, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("threshold must be in [0,1]");
  validate(pair);
  ConfusionCounts c;
  for_each_in_mask(pair, [&](double p, bool truth) {
    const bool called = p >= t;
    if (called && truth) ++c.tp;
    else if (called) ++c.fp;
    else if (truth) ++c.fn;
    else ++c.tn;
  });
  return c;
}

BinaryMetrics binary_metrics(const ConfusionCounts& c) {
  if (c.total() == 0) throw std::invalid_argument("binary_metrics: no evaluated pixels");
  BinaryMetrics m;
  m.acc = ratio(c.tp + c.tn, c.total());
  m.sp = ratio(c.tn, c.tn + c.fp);
  m.se = ratio(c.tp, c.tp + c.fn);
  m.f1 = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
  return m;
}

std::vector<ScoredLabel> gather_scores(const EvalPair& pair) {
  validate(pair);
  std::vector<ScoredLabel> out;
  out.reserve(static_cast<std::size_t>(pair.truth.size()));
  for_each_in_mask(pair, [&](double p, bool truth) { out.push_back({p, truth}); });
  return out;
}

RocCurve roc_auc(std::vector<ScoredLabel> samples) {
  std::uint64_t positives = 0;
  for (const auto& s : samples) positives += s.positive ? 1 : 0;
  const std::uint64_t negatives = samples.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw std::invalid_argument(
        "AUC undefined: ground truth contains only " +
        std::string(positives == 0 ? "negative" : "positive") + " pixels");
  }
  std::sort(samples.begin(), samples.end(),
            [](const ScoredLabel& a, const ScoredLabel& b) { return a.score > b.score; });

  RocCurve curve;
  curve.positives = positives;
  curve.negatives = negatives;
  curve.points.push_back({1.0, 0.0, 0.0});
  // Twice the U statistic, kept integral so the final division is the only
  // rounding step.
  std::uint64_t twice_u = 0;
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  for (std::size_t i = 0; i < samples.size();) {
    const double score = samples[i].score;
    std::uint64_t pos = 0;
    std::uint64_t neg = 0;
    for (; i < samples.size() && samples[i].score == score; ++i) {
      (samples[i].positive ? pos : neg) += 1;
    }
    // Positives in this group beat every negative with a strictly lower
    // score, i.e. every negative not yet seen.
    twice_u += 2 * pos * (negatives - fp - neg) + pos * neg;
    tp += pos;
    fp += neg;
    curve.points.push_back({score, static_cast<double>(fp) / static_cast<double>(negatives),
                            static_cast<double>(tp) / static_cast<double>(positives)});
  }
  curve.auc = static_cast<double>(twice_u) /
              (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
  return curve;
}

RocCurve roc_auc(const EvalPair& pair) { return roc_auc(gather_scores(pair)); }

double trapezoid_area(std::span<const RocPoint> points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) * 0.5;
  }
  return area;
}

namespace {

MetricsReport report_from(std::vector<ScoredLabel> scores, const ConfusionCounts& counts,
                          double threshold) {
  MetricsReport r;
  r.threshold = threshold;
  r.counts = counts;
  r.pixels = counts.total();
  if (r.pixels > 0) r.binary = binary_metrics(counts);
  if (counts.tp + counts.fn > 0 && counts.tn + counts.fp > 0) {
    RocCurve curve = roc_auc(std::move(scores));
    r.auc = curve.auc;
    r.roc = std::move(curve.points);
  }
  return r;
}

ConfusionCounts count_scores(const std::vector<ScoredLabel>& scores, double threshold) {
  ConfusionCounts c;
  for (const auto& s : scores) {
    const bool called = s.score >= threshold;
    if (called && s.positive) ++c.tp;
    else if (called) ++c.fp;
    else if (s.positive) ++c.fn;
    else ++c.tn;
  }
  return c;
}

void accumulate(std::optional<double>& sum, int& n, const std::optional<double>& v) {
  if (!v) return;
  sum = sum.value_or(0.0) + *v;
  ++n;
}

std::optional<double> divide(const std::optional<double>& sum, int n) {
  if (!sum || n == 0) return std::nullopt;
  return *sum / n;
}

}  // namespace

MetricsReport evaluate_pair(const EvalPair& pair, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("threshold must be in [0,1]");
  }
  auto scores = gather_scores(pair);
  if (scores.empty()) throw std::invalid_argument("no evaluated pixels in " + pair.id);
  const ConfusionCounts counts = count_scores(scores, threshold);
  MetricsReport r = report_from(std::move(scores), counts, threshold);
  r.id = pair.id;
  return r;
}

DatasetReport evaluate_dataset(std::span<const EvalPair> pairs, double threshold) {
  if (pairs.empty()) throw std::invalid_argument("evaluate_dataset: no pairs");
  DatasetReport report;
  std::vector<ScoredLabel> pooled_scores;
  ConfusionCounts pooled_counts;
  for (const auto& pair : pairs) {
    report.per_image.push_back(evaluate_pair(pair, threshold));
    pooled_counts += report.per_image.back().counts;
    auto scores = gather_scores(pair);
    pooled_scores.insert(pooled_scores.end(), scores.begin(), scores.end());
  }
  report.pooled = report_from(std::move(pooled_scores), pooled_counts, threshold);
  report.pooled.id = "pooled";

  MetricsReport& mean = report.mean;
  mean.id = "mean";
  mean.threshold = threshold;
  mean.counts = pooled_counts;
  mean.pixels = pooled_counts.total();
  std::optional<double> auc, acc, sp, se, f1;
  int n_auc = 0, n_acc = 0, n_sp = 0, n_se = 0, n_f1 = 0;
  for (const auto& r : report.per_image) {
    accumulate(auc, n_auc, r.auc);
    accumulate(acc, n_acc, r.binary.acc);
    accumulate(sp, n_sp, r.binary.sp);
    accumulate(se, n_se, r.binary.se);
    accumulate(f1, n_f1, r.binary.f1);
  }
  mean.auc = divide(auc, n_auc);
  mean.binary = {divide(acc, n_acc), divide(sp, n_sp), divide(se, n_se), divide(f1, n_f1)};
  return report;
}

}  // namespace vesselaug
