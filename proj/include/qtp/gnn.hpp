#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qtp/dag.hpp"
#include "qtp/tape.hpp"

namespace qtp {

enum class FirstLayer { GAT, GCN };

inline constexpr double kGcnSlope = 0.01;
inline constexpr double kAttentionSlope = 0.2;

struct ModelConfig {
  FirstLayer first_layer = FirstLayer::GAT;
  int hidden = 32;
  int heads = 4;  // ignored for GCN
  int residual_blocks = 1;
  std::vector<int> ffnn_hidden{256, 32};

  /// Width after the first layer: heads * hidden for GAT, hidden for GCN.
  int width() const noexcept { return first_layer == FirstLayer::GAT ? heads * hidden : hidden; }

  /// e.g. "GAT_1GCN_2FFNN_32_4_2048_2048_32". The FFNN count token is
  /// ffnn_hidden.size() - 1.
  std::string name() const;

  /// Structural checks only (positive sizes, 1..3 FFNN layers). Throws DataError.
  void validate() const;

  /// True when every field is inside the hyper-parameter grid.
  bool on_grid() const;

  bool operator==(const ModelConfig&) const = default;
};

/// Canonical grid order: first-layer type (GAT first), hidden, heads, blocks,
/// then FFNN widths lexicographically.
bool canonical_less(const ModelConfig& a, const ModelConfig& b);

nlohmann::json config_to_json(const ModelConfig& c);
ModelConfig config_from_json(const nlohmann::json& j);

struct ParamSpec {
  std::string name;
  int rows;
  int cols;
  bool bias;
};

/// Parameter list in forward-consumption order.
std::vector<ParamSpec> param_specs(const ModelConfig& c);

struct Model {
  ModelConfig config;
  std::vector<ad::Tensor> params;  // aligned with param_specs(config)

  /// Throws DataError if any tensor disagrees with the config-derived shape.
  void check_shapes() const;

  bool operator==(const Model&) const = default;
};

/// Glorot-uniform weights (bound sqrt(6/(rows+cols))), zero biases.
Model init_model(const ModelConfig& c, std::uint64_t seed);

/// Several graphs stacked as one block-diagonal graph.
struct GraphBatch {
  int num_graphs = 0;
  int num_nodes = 0;
  ad::Tensor features;             // num_nodes x kFeatureSize
  std::vector<int> graph_ids;      // per node
  ad::SparseMatrix adjacency;      // normalized, block-diagonal
  std::vector<int> att_src;        // attention edges j -> i, including self-loops
  std::vector<int> att_dst;
};

/// D^-1/2 (A + I) D^-1/2 over the symmetrized edge set.
ad::SparseMatrix normalize_adjacency(const CircuitDag& d);

/// Throws DataError on an empty batch or a graph without nodes.
GraphBatch make_batch(std::span<const CircuitDag* const> graphs);
GraphBatch make_batch(const CircuitDag& g);

// Layers on tape variables.
ad::Var gcn_layer(const ad::SparseMatrix& a_hat, ad::Var h, ad::Var w, ad::Var b);
ad::Var residual_gcn(const ad::SparseMatrix& a_hat, ad::Var h, ad::Var w, ad::Var b);

struct GatHead {
  ad::Var w;      // in x hidden
  ad::Var a_src;  // hidden x 1, scores the neighbor j
  ad::Var a_dst;  // hidden x 1, scores the receiving node i
};
ad::Var gat_layer(std::span<const int> src, std::span<const int> dst, ad::Var h,
                  std::span<const GatHead> heads);

ad::Var global_mean_pool(ad::Var h, std::span<const int> graph_ids, int num_graphs);

/// Full network; returns num_graphs x 2 probabilities. `params` follows
/// param_specs(config).
ad::Var model_forward(const ModelConfig& config, std::span<const ad::Var> params,
                      const GraphBatch& batch);

/// Forward pass without gradient bookkeeping beyond a scratch tape.
ad::Tensor predict(const Model& m, const GraphBatch& batch);

}  // namespace qtp
