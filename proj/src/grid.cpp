#include "qtp/grid.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <numeric>
#include <thread>

#include "qtp/random.hpp"

namespace qtp {

namespace {

std::vector<std::vector<int>> ffnn_options() {
  std::vector<std::vector<int>> out;
  for (int w1 = 32; w1 <= 2048; w1 *= 2) {
    for (int w2 = 16; w2 <= w1; w2 *= 2) {
      out.push_back({w1, w2});
      for (int w3 = 16; w3 <= w2; w3 *= 2) out.push_back({w1, w2, w3});
    }
  }
  return out;
}

}  // namespace

std::vector<ModelConfig> enumerate_grid() {
  std::vector<ModelConfig> firsts;
  for (int h : {32, 64}) {
    for (int k : {4, 8}) firsts.push_back({FirstLayer::GAT, h, k, 1, {}});
  }
  for (int h : {32, 64, 128}) firsts.push_back({FirstLayer::GCN, h, 1, 1, {}});
  const auto heads = ffnn_options();
  std::vector<ModelConfig> out;
  for (const auto& f : firsts) {
    for (int blocks : {1, 2}) {
      for (const auto& w : heads) {
        ModelConfig c = f;
        c.residual_blocks = blocks;
        c.ffnn_hidden = w;
        out.push_back(std::move(c));
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), canonical_less);
  return out;
}

std::vector<ModelConfig> sample_grid(std::size_t budget, std::uint64_t seed) {
  auto all = enumerate_grid();
  if (budget == 0 || budget >= all.size()) return all;
  std::vector<std::size_t> idx(all.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(idx));
  idx.resize(budget);
  std::sort(idx.begin(), idx.end());
  std::vector<ModelConfig> out;
  for (std::size_t i : idx) out.push_back(all[i]);
  return out;
}

std::vector<GridRow> run_grid(std::span<const ModelConfig> configs, const Dataset& data, const TrainOptions& opts) {
  std::vector<GridRow> rows(configs.size());
  TrainOptions inner = opts;
  inner.jobs = 1;
  std::vector<std::exception_ptr> errors(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        rows[i] = {configs[i], train(configs[i], data, inner).summary};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(configs.size())));
  {
    std::vector<std::jthread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const GridRow& a, const GridRow& b) {
    if (a.summary.f1_class0.mean != b.summary.f1_class0.mean) return a.summary.f1_class0.mean > b.summary.f1_class0.mean;
    return canonical_less(a.config, b.config);
  });
  return rows;
}

std::string grid_table_csv(std::span<const GridRow> rows) {
  std::string out = "model,f1_class0,f1_class1,acc,f1_class0_std,f1_class1_std,acc_std\n";
  char buf[256];
  for (const auto& r : rows) {
    const Aggregate& a = r.summary;
    std::snprintf(buf, sizeof(buf), ",%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", a.f1_class0.mean, a.f1_class1.mean,
                  a.accuracy.mean, a.f1_class0.std, a.f1_class1.std, a.accuracy.std);
    out += r.config.name() + buf;
  }
  return out;
}

nlohmann::json grid_to_json(std::span<const GridRow> rows) {
  nlohmann::json j = nlohmann::json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    j.push_back({{"rank", i + 1},
                 {"model", rows[i].config.name()},
                 {"config", config_to_json(rows[i].config)},
                 {"aggregate", to_json(rows[i].summary)}});
  }
  return j;
}

}  // namespace qtp
