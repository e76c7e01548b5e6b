#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace qtp {

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  bool operator==(const ClassScores&) const = default;
};

struct MetricBlock {
  std::array<std::array<int, 2>, 2> confusion{};  // [true label][predicted]
  int total = 0;
  double accuracy = 0.0;
  std::array<ClassScores, 2> classes{};

  bool operator==(const MetricBlock&) const = default;
};

struct QubitBucket {
  int lo;
  int hi;
};
inline constexpr std::array<QubitBucket, 3> kQubitBuckets{{{2, 7}, {8, 15}, {16, 27}}};

struct BucketMetrics {
  int lo = 0;
  int hi = 0;
  MetricBlock metrics;

  bool operator==(const BucketMetrics&) const = default;
};

struct FoldReport {
  int fold_id = 0;
  MetricBlock overall;
  std::vector<BucketMetrics> buckets;  // non-empty buckets only
  std::vector<double> loss_curve;      // mean training loss per epoch
  double train_accuracy = 0.0;
  int train_size = 0;

  bool operator==(const FoldReport&) const = default;
};

/// Confusion matrix and derived scores. F1 is 0 when precision + recall is 0;
/// precision (recall) is 0 when its denominator is 0. Throws DataError on
/// empty or misaligned input.
MetricBlock score(std::span<const int> predictions, std::span<const int> labels);

/// Overall block plus one block per populated qubit bucket.
FoldReport metrics(std::span<const int> predictions, std::span<const int> labels,
                   std::span<const int> qubit_counts);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population

  bool operator==(const MeanStd&) const = default;
};

struct Aggregate {
  MeanStd accuracy;
  MeanStd f1_class0;
  MeanStd f1_class1;
  MeanStd precision_class0;
  MeanStd precision_class1;
  MeanStd recall_class0;
  MeanStd recall_class1;
  MeanStd train_accuracy;

  bool operator==(const Aggregate&) const = default;
};

MeanStd mean_std(std::span<const double> values);
/// Throws DataError when `reports` is empty.
Aggregate aggregate(std::span<const FoldReport> reports);

nlohmann::json to_json(const MetricBlock& m);
nlohmann::json to_json(const FoldReport& r);
nlohmann::json to_json(const Aggregate& a);

}  // namespace qtp
