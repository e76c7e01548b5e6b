#include "qtp/metrics.hpp"

#include <cmath>

#include "qtp/error.hpp"

namespace qtp {

MetricBlock score(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) throw DataError("predictions and labels differ in length");
  if (labels.empty()) throw DataError("cannot score an empty set");
  MetricBlock m;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if ((labels[i] != 0 && labels[i] != 1) || (predictions[i] != 0 && predictions[i] != 1)) {
      throw DataError("labels and predictions must be 0 or 1");
    }
    ++m.confusion[labels[i]][predictions[i]];
  }
  m.total = static_cast<int>(labels.size());
  m.accuracy = static_cast<double>(m.confusion[0][0] + m.confusion[1][1]) / m.total;
  for (int c = 0; c < 2; ++c) {
    const int tp = m.confusion[c][c];
    const int pred_c = m.confusion[0][c] + m.confusion[1][c];
    const int true_c = m.confusion[c][0] + m.confusion[c][1];
    ClassScores& s = m.classes[c];
    s.precision = pred_c ? static_cast<double>(tp) / pred_c : 0.0;
    s.recall = true_c ? static_cast<double>(tp) / true_c : 0.0;
    s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  }
  return m;
}

FoldReport metrics(std::span<const int> predictions, std::span<const int> labels,
                   std::span<const int> qubit_counts) {
  if (qubit_counts.size() != labels.size()) throw DataError("qubit counts and labels differ in length");
  FoldReport r;
  r.overall = score(predictions, labels);
  for (const auto& b : kQubitBuckets) {
    std::vector<int> p, l;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (qubit_counts[i] >= b.lo && qubit_counts[i] <= b.hi) {
        p.push_back(predictions[i]);
        l.push_back(labels[i]);
      }
    }
    if (!l.empty()) r.buckets.push_back({b.lo, b.hi, score(p, l)});
  }
  return r;
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) throw DataError("mean of nothing");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / values.size();
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / values.size())};
}

Aggregate aggregate(std::span<const FoldReport> reports) {
  if (reports.empty()) throw DataError("nothing to aggregate");
  auto collect = [&](auto get) {
    std::vector<double> v;
    for (const auto& r : reports) v.push_back(get(r));
    return mean_std(v);
  };
  Aggregate a;
  a.accuracy = collect([](const FoldReport& r) { return r.overall.accuracy; });
  a.f1_class0 = collect([](const FoldReport& r) { return r.overall.classes[0].f1; });
  a.f1_class1 = collect([](const FoldReport& r) { return r.overall.classes[1].f1; });
  a.precision_class0 = collect([](const FoldReport& r) { return r.overall.classes[0].precision; });
  a.precision_class1 = collect([](const FoldReport& r) { return r.overall.classes[1].precision; });
  a.recall_class0 = collect([](const FoldReport& r) { return r.overall.classes[0].recall; });
  a.recall_class1 = collect([](const FoldReport& r) { return r.overall.classes[1].recall; });
  a.train_accuracy = collect([](const FoldReport& r) { return r.train_accuracy; });
  return a;
}

nlohmann::json to_json(const MetricBlock& m) {
  nlohmann::json j;
  j["confusion"] = m.confusion;
  j["total"] = m.total;
  j["accuracy"] = m.accuracy;
  for (int c = 0; c < 2; ++c) {
    const std::string k = "class" + std::to_string(c);
    j[k] = {{"precision", m.classes[c].precision}, {"recall", m.classes[c].recall}, {"f1", m.classes[c].f1}};
  }
  return j;
}

nlohmann::json to_json(const FoldReport& r) {
  nlohmann::json j;
  j["fold_id"] = r.fold_id;
  j["overall"] = to_json(r.overall);
  j["buckets"] = nlohmann::json::array();
  for (const auto& b : r.buckets) {
    j["buckets"].push_back({{"qubits", std::to_string(b.lo) + "-" + std::to_string(b.hi)},
                            {"metrics", to_json(b.metrics)}});
  }
  j["loss_curve"] = r.loss_curve;
  j["train_accuracy"] = r.train_accuracy;
  j["train_size"] = r.train_size;
  return j;
}

nlohmann::json to_json(const Aggregate& a) {
  auto ms = [](const MeanStd& m) { return nlohmann::json{{"mean", m.mean}, {"std", m.std}}; };
  return {{"accuracy", ms(a.accuracy)},
          {"f1_class0", ms(a.f1_class0)},
          {"f1_class1", ms(a.f1_class1)},
          {"precision_class0", ms(a.precision_class0)},
          {"precision_class1", ms(a.precision_class1)},
          {"recall_class0", ms(a.recall_class0)},
          {"recall_class1", ms(a.recall_class1)},
          {"train_accuracy", ms(a.train_accuracy)}};
}

}  // namespace qtp
