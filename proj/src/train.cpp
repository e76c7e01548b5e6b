#include "qtp/train.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "qtp/error.hpp"
#include "qtp/log.hpp"
#include "qtp/random.hpp"

namespace qtp {

using ad::Tensor;
using ad::Var;

std::array<double, 2> class_weights(std::span<const int> labels) {
  std::array<int, 2> n{0, 0};
  for (int y : labels) {
    if (y != 0 && y != 1) throw DataError("labels must be 0 or 1");
    ++n[y];
  }
  if (n[0] == 0 || n[1] == 0) throw DataError("class weights need both classes present");
  const double total = static_cast<double>(labels.size());
  return {total / (2.0 * n[0]), total / (2.0 * n[1])};
}

Var weighted_cross_entropy(Var probs, std::span<const int> labels, const std::array<double, 2>& weights) {
  if (probs.cols() != 2 || probs.rows() != static_cast<int>(labels.size()) || labels.empty()) {
    throw DataError("cross-entropy shape mismatch");
  }
  Tensor mask(probs.rows(), 2);
  const double inv = 1.0 / static_cast<double>(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw DataError("labels must be 0 or 1");
    mask(static_cast<int>(i), labels[i]) = -weights[labels[i]] * inv;
  }
  const Var logp = ad::log(ad::clamp_min(probs, kProbClamp));
  return ad::sum(ad::mul(logp, probs.tape->constant(std::move(mask))));
}

void adam_step(std::span<Tensor> params, std::span<const Tensor> grads, AdamState& s, const AdamOptions& o) {
  if (params.size() != grads.size()) throw DataError("adam: parameter and gradient counts differ");
  if (s.m.empty()) {
    for (const auto& p : params) {
      s.m.emplace_back(p.rows(), p.cols());
      s.v.emplace_back(p.rows(), p.cols());
    }
  }
  if (s.m.size() != params.size()) throw DataError("adam: state does not match parameters");
  ++s.t;
  const double c1 = 1.0 - std::pow(o.beta1, s.t);
  const double c2 = 1.0 - std::pow(o.beta2, s.t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].same_shape(grads[i]) || !params[i].same_shape(s.m[i])) throw DataError("adam: shape mismatch");
    auto& p = params[i].data();
    const auto& g = grads[i].data();
    auto& m = s.m[i].data();
    auto& v = s.v[i].data();
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = o.beta1 * m[k] + (1.0 - o.beta1) * g[k];
      v[k] = o.beta2 * v[k] + (1.0 - o.beta2) * g[k] * g[k];
      p[k] -= o.lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + o.eps);
    }
  }
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

GraphBatch batch_of(const Dataset& data, std::span<const int> idx) {
  std::vector<const CircuitDag*> g;
  g.reserve(idx.size());
  for (int i : idx) g.push_back(&data.graphs.at(i));
  return make_batch(g);
}

}  // namespace

Model fit(const ModelConfig& config, const Dataset& data, std::span<const int> train_idx, const TrainOptions& opts,
          std::uint64_t init_seed, std::uint64_t shuffle_seed, std::vector<double>* loss_curve) {
  if (train_idx.empty()) throw DataError("empty training set");
  if (opts.batch_size <= 0) throw DataError("batch size must be positive");
  std::vector<int> train_labels;
  for (int i : train_idx) train_labels.push_back(data.labels.at(i));
  const auto weights = class_weights(train_labels);

  Model model = init_model(config, init_seed);
  AdamState state;
  Rng rng(shuffle_seed);
  std::vector<int> order(train_idx.begin(), train_idx.end());
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    rng.shuffle(std::span<int>(order));
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += opts.batch_size) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(opts.batch_size));
      const std::span<const int> idx(order.data() + start, end - start);
      std::vector<int> labels;
      for (int i : idx) labels.push_back(data.labels[i]);
      const GraphBatch batch = batch_of(data, idx);

      ad::Tape tape;
      std::vector<Var> vars;
      for (const auto& p : model.params) vars.push_back(tape.param(p));
      const Var loss = weighted_cross_entropy(model_forward(config, vars, batch), labels, weights);
      tape.backward(loss);
      std::vector<Tensor> grads;
      for (Var v : vars) grads.push_back(tape.grad(v));
      adam_step(model.params, grads, state, opts.adam);
      total += loss.value()(0, 0) * static_cast<double>(idx.size());
    }
    const double mean = total / static_cast<double>(order.size());
    if (loss_curve) loss_curve->push_back(mean);
    log_debug(config.name() + " epoch " + std::to_string(epoch + 1) + " loss " + std::to_string(mean));
  }
  return model;
}

std::vector<int> predict_classes(const Model& m, const Dataset& data, std::span<const int> idx, int batch_size) {
  std::vector<int> out;
  for (std::size_t start = 0; start < idx.size(); start += batch_size) {
    const std::size_t end = std::min(idx.size(), start + static_cast<std::size_t>(batch_size));
    const Tensor p = predict(m, batch_of(data, idx.subspan(start, end - start)));
    for (int r = 0; r < p.rows(); ++r) out.push_back(p(r, 1) > p(r, 0) ? 1 : 0);
  }
  return out;
}

FoldReport evaluate(const Model& m, const Dataset& data, std::span<const int> idx) {
  const auto preds = predict_classes(m, data, idx);
  std::vector<int> labels, qubits;
  for (int i : idx) {
    labels.push_back(data.labels.at(i));
    qubits.push_back(data.qubit_counts.at(i));
  }
  return metrics(preds, labels, qubits);
}

TrainResult train(const ModelConfig& config, const Dataset& data, const TrainOptions& opts) {
  config.validate();
  if (data.size() == 0) throw DataError("empty dataset");
  const auto folds = make_splits(data.labels, opts.folds, opts.seed, opts.split_mode);
  TrainResult result;
  result.config = config;
  result.options = opts;
  result.folds.resize(folds.size());

  auto run = [&](std::size_t f) {
    const std::uint64_t init_seed = mix_seed(opts.seed, 2 * f);
    FoldResult& out = result.folds[f];
    out.init_seed = init_seed;
    out.model = fit(config, data, folds[f].train, opts, init_seed, mix_seed(opts.seed, 2 * f + 1),
                    &out.report.loss_curve);
    auto curve = std::move(out.report.loss_curve);
    out.report = evaluate(out.model, data, folds[f].test);
    out.report.loss_curve = std::move(curve);
    out.report.fold_id = static_cast<int>(f);
    out.report.train_size = static_cast<int>(folds[f].train.size());
    std::vector<int> train_labels;
    for (int i : folds[f].train) train_labels.push_back(data.labels[i]);
    out.report.train_accuracy = score(predict_classes(out.model, data, folds[f].train), train_labels).accuracy;
    log_info(config.name() + " fold " + std::to_string(f) + " accuracy " +
             std::to_string(out.report.overall.accuracy));
  };

  const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(folds.size())));
  if (jobs == 1) {
    for (std::size_t f = 0; f < folds.size(); ++f) run(f);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(folds.size());
    {
      std::vector<std::jthread> pool;
      for (int j = 0; j < jobs; ++j) {
        pool.emplace_back([&] {
          for (std::size_t f = next++; f < folds.size(); f = next++) {
            try {
              run(f);
            } catch (...) {
              errors[f] = std::current_exception();
            }
          }
        });
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  std::vector<FoldReport> reports;
  for (const auto& f : result.folds) reports.push_back(f.report);
  result.summary = aggregate(reports);
  return result;
}

nlohmann::json to_json(const TrainResult& r) {
  nlohmann::json j;
  j["model"] = r.config.name();
  j["config"] = config_to_json(r.config);
  j["options"] = {{"folds", r.options.folds},
                  {"epochs", r.options.epochs},
                  {"batch_size", r.options.batch_size},
                  {"seed", r.options.seed},
                  {"split_mode", std::string(split_mode_name(r.options.split_mode))},
                  {"learning_rate", r.options.adam.lr}};
  j["folds"] = nlohmann::json::array();
  for (const auto& f : r.folds) j["folds"].push_back(to_json(f.report));
  j["aggregate"] = to_json(r.summary);
  return j;
}

}  // namespace qtp
