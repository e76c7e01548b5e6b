#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "qtp/gnn.hpp"
#include "qtp/manifest.hpp"
#include "qtp/metrics.hpp"
#include "qtp/split.hpp"

namespace qtp {

/// w_c = N / (2 N_c). Throws DataError if a class is absent.
std::array<double, 2> class_weights(std::span<const int> labels);

inline constexpr double kProbClamp = 1e-12;

/// Mean over rows of -w[y] ln max(p[y], 1e-12).
ad::Var weighted_cross_entropy(ad::Var probs, std::span<const int> labels, const std::array<double, 2>& weights);

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<ad::Tensor> m;
  std::vector<ad::Tensor> v;
  int t = 0;  // steps taken
};

/// One bias-corrected Adam update; increments state.t. Moment buffers are
/// allocated on the first call.
void adam_step(std::span<ad::Tensor> params, std::span<const ad::Tensor> grads, AdamState& state,
               const AdamOptions& opt = {});

struct TrainOptions {
  int folds = 5;
  int epochs = 50;
  int batch_size = 32;
  std::uint64_t seed = 0;
  SplitMode split_mode = SplitMode::CV;
  int jobs = 1;
  AdamOptions adam;
};

struct FoldResult {
  FoldReport report;
  Model model;
  std::uint64_t init_seed = 0;
};

struct TrainResult {
  ModelConfig config;
  TrainOptions options;
  std::vector<FoldResult> folds;
  Aggregate summary;
};

/// Trains on `train_idx` for opts.epochs epochs with per-epoch shuffled
/// minibatches; class weights come from the training labels only.
Model fit(const ModelConfig& config, const Dataset& data, std::span<const int> train_idx,
          const TrainOptions& opts, std::uint64_t init_seed, std::uint64_t shuffle_seed,
          std::vector<double>* loss_curve = nullptr);

/// Predicted class per listed graph (argmax, ties to class 0).
std::vector<int> predict_classes(const Model& m, const Dataset& data, std::span<const int> idx,
                                 int batch_size = 64);

/// Metrics of `m` on the listed graphs.
FoldReport evaluate(const Model& m, const Dataset& data, std::span<const int> idx);

/// One model per split; folds run on up to opts.jobs threads.
TrainResult train(const ModelConfig& config, const Dataset& data, const TrainOptions& opts);

nlohmann::json to_json(const TrainResult& r);

}  // namespace qtp
