#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qtp/train.hpp"

namespace qtp {

/// Every on-grid config in canonical order.
std::vector<ModelConfig> enumerate_grid();

/// `budget` configs drawn without replacement using `seed`, returned in
/// canonical order. budget == 0 or budget >= grid size gives the full grid.
std::vector<ModelConfig> sample_grid(std::size_t budget, std::uint64_t seed);

struct GridRow {
  ModelConfig config;
  Aggregate summary;
};

/// Trains every config (configs fan out over opts.jobs threads, folds run
/// sequentially inside each) and returns rows ranked by mean class-0 F1,
/// descending; ties keep canonical order.
std::vector<GridRow> run_grid(std::span<const ModelConfig> configs, const Dataset& data, const TrainOptions& opts);

/// Header: model,f1_class0,f1_class1,acc,f1_class0_std,f1_class1_std,acc_std
std::string grid_table_csv(std::span<const GridRow> rows);
nlohmann::json grid_to_json(std::span<const GridRow> rows);

}  // namespace qtp
