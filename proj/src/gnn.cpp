#include "qtp/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qtp/error.hpp"
#include "qtp/random.hpp"

namespace qtp {

using ad::Var;

namespace {

bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

std::string ModelConfig::name() const {
  std::string s = first_layer == FirstLayer::GAT ? "GAT" : "GCN";
  s += "_" + std::to_string(residual_blocks) + "GCN";
  s += "_" + std::to_string(static_cast<int>(ffnn_hidden.size()) - 1) + "FFNN";
  s += "_" + std::to_string(hidden);
  if (first_layer == FirstLayer::GAT) s += "_" + std::to_string(heads);
  for (int w : ffnn_hidden) s += "_" + std::to_string(w);
  return s;
}

void ModelConfig::validate() const {
  if (hidden <= 0) throw DataError("hidden size must be positive");
  if (first_layer == FirstLayer::GAT && heads <= 0) throw DataError("head count must be positive");
  if (residual_blocks < 0) throw DataError("residual block count must be non-negative");
  if (ffnn_hidden.empty() || ffnn_hidden.size() > 3) throw DataError("FFNN needs 1 to 3 hidden layers");
  for (int w : ffnn_hidden) {
    if (w <= 0) throw DataError("FFNN widths must be positive");
  }
}

bool ModelConfig::on_grid() const {
  if (first_layer == FirstLayer::GAT) {
    if (hidden != 32 && hidden != 64) return false;
    if (heads != 4 && heads != 8) return false;
  } else if (hidden != 32 && hidden != 64 && hidden != 128) {
    return false;
  }
  if (residual_blocks != 1 && residual_blocks != 2) return false;
  if (ffnn_hidden.size() != 2 && ffnn_hidden.size() != 3) return false;
  if (!is_pow2(ffnn_hidden[0]) || ffnn_hidden[0] < 32 || ffnn_hidden[0] > 2048) return false;
  for (std::size_t i = 1; i < ffnn_hidden.size(); ++i) {
    if (!is_pow2(ffnn_hidden[i]) || ffnn_hidden[i] < 16 || ffnn_hidden[i] > ffnn_hidden[i - 1]) return false;
  }
  return true;
}

bool canonical_less(const ModelConfig& a, const ModelConfig& b) {
  const int ha = a.first_layer == FirstLayer::GAT ? a.heads : 0;
  const int hb = b.first_layer == FirstLayer::GAT ? b.heads : 0;
  return std::tie(a.first_layer, a.hidden, ha, a.residual_blocks, a.ffnn_hidden) <
         std::tie(b.first_layer, b.hidden, hb, b.residual_blocks, b.ffnn_hidden);
}

nlohmann::json config_to_json(const ModelConfig& c) {
  nlohmann::json j;
  j["first_layer"] = c.first_layer == FirstLayer::GAT ? "GAT" : "GCN";
  j["hidden"] = c.hidden;
  if (c.first_layer == FirstLayer::GAT) j["heads"] = c.heads;
  j["residual_gcn_blocks"] = c.residual_blocks;
  j["ffnn_hidden"] = c.ffnn_hidden;
  j["name"] = c.name();
  return j;
}

ModelConfig config_from_json(const nlohmann::json& j) {
  try {
    ModelConfig c;
    const auto kind = j.at("first_layer").get<std::string>();
    if (kind == "GAT") {
      c.first_layer = FirstLayer::GAT;
      c.heads = j.at("heads").get<int>();
    } else if (kind == "GCN") {
      c.first_layer = FirstLayer::GCN;
      c.heads = 1;
    } else {
      throw DataError("first_layer must be GAT or GCN, got " + kind);
    }
    c.hidden = j.at("hidden").get<int>();
    c.residual_blocks = j.at("residual_gcn_blocks").get<int>();
    c.ffnn_hidden = j.at("ffnn_hidden").get<std::vector<int>>();
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model config: ") + e.what());
  }
}

std::vector<ParamSpec> param_specs(const ModelConfig& c) {
  c.validate();
  std::vector<ParamSpec> s;
  if (c.first_layer == FirstLayer::GAT) {
    for (int k = 0; k < c.heads; ++k) {
      const std::string p = "gat" + std::to_string(k);
      s.push_back({p + ".W", kFeatureSize, c.hidden, false});
      s.push_back({p + ".a_src", c.hidden, 1, false});
      s.push_back({p + ".a_dst", c.hidden, 1, false});
    }
  } else {
    s.push_back({"gcn.W", kFeatureSize, c.hidden, false});
    s.push_back({"gcn.b", 1, c.hidden, true});
  }
  const int w = c.width();
  for (int i = 0; i < c.residual_blocks; ++i) {
    const std::string p = "res" + std::to_string(i);
    s.push_back({p + ".W", w, w, false});
    s.push_back({p + ".b", 1, w, true});
  }
  int prev = w;
  for (std::size_t i = 0; i < c.ffnn_hidden.size(); ++i) {
    const std::string p = "ffnn" + std::to_string(i);
    s.push_back({p + ".W", prev, c.ffnn_hidden[i], false});
    s.push_back({p + ".b", 1, c.ffnn_hidden[i], true});
    prev = c.ffnn_hidden[i];
  }
  s.push_back({"out.W", prev, 2, false});
  s.push_back({"out.b", 1, 2, true});
  return s;
}

void Model::check_shapes() const {
  const auto specs = param_specs(config);
  if (specs.size() != params.size()) throw DataError("parameter count does not match the config");
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (params[i].rows() != specs[i].rows || params[i].cols() != specs[i].cols) {
      throw DataError("parameter " + specs[i].name + " has the wrong shape");
    }
  }
}

Model init_model(const ModelConfig& c, std::uint64_t seed) {
  Model m;
  m.config = c;
  Rng rng(seed);
  for (const auto& s : param_specs(c)) {
    ad::Tensor t(s.rows, s.cols);
    if (!s.bias) {
      const double bound = std::sqrt(6.0 / (s.rows + s.cols));
      for (double& x : t.data()) x = rng.uniform(-bound, bound);
    }
    m.params.push_back(std::move(t));
  }
  return m;
}

ad::SparseMatrix normalize_adjacency(const CircuitDag& d) {
  const int n = static_cast<int>(d.nodes.size());
  std::set<std::pair<int, int>> und;
  for (auto [u, v] : d.edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) throw DataError("edge endpoint out of range");
    if (u != v) und.emplace(std::min(u, v), std::max(u, v));
  }
  std::vector<double> deg(n, 1.0);
  for (auto [u, v] : und) {
    deg[u] += 1.0;
    deg[v] += 1.0;
  }
  std::vector<std::pair<std::pair<int, int>, double>> t;
  for (int i = 0; i < n; ++i) t.push_back({{i, i}, 1.0 / deg[i]});
  for (auto [u, v] : und) {
    const double w = 1.0 / std::sqrt(deg[u] * deg[v]);
    t.push_back({{u, v}, w});
    t.push_back({{v, u}, w});
  }
  return ad::SparseMatrix::from_triplets(n, n, std::move(t));
}

GraphBatch make_batch(std::span<const CircuitDag* const> graphs) {
  if (graphs.empty()) throw DataError("empty batch");
  GraphBatch b;
  b.num_graphs = static_cast<int>(graphs.size());
  for (const CircuitDag* g : graphs) {
    if (g->nodes.empty()) throw DataError("graph without nodes: " + g->source_name);
    b.num_nodes += static_cast<int>(g->nodes.size());
  }
  b.features = ad::Tensor(b.num_nodes, kFeatureSize);
  std::vector<std::pair<std::pair<int, int>, double>> trip;
  int off = 0;
  for (int gi = 0; gi < b.num_graphs; ++gi) {
    const CircuitDag& g = *graphs[gi];
    const int n = static_cast<int>(g.nodes.size());
    for (int i = 0; i < n; ++i) {
      std::copy(g.nodes[i].feature.begin(), g.nodes[i].feature.end(), b.features.row(off + i));
      b.graph_ids.push_back(gi);
    }
    const ad::SparseMatrix a = normalize_adjacency(g);
    for (int r = 0; r < a.rows; ++r) {
      for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
        trip.push_back({{off + r, off + a.col_idx[k]}, a.values[k]});
      }
    }
    for (int i = 0; i < n; ++i) {
      b.att_src.push_back(off + i);
      b.att_dst.push_back(off + i);
    }
    for (auto [u, v] : g.edges) {
      if (u == v) continue;
      b.att_src.push_back(off + u);
      b.att_dst.push_back(off + v);
    }
    off += n;
  }
  b.adjacency = ad::SparseMatrix::from_triplets(b.num_nodes, b.num_nodes, std::move(trip));
  return b;
}

GraphBatch make_batch(const CircuitDag& g) {
  const CircuitDag* p = &g;
  return make_batch(std::span<const CircuitDag* const>(&p, 1));
}

Var gcn_layer(const ad::SparseMatrix& a_hat, Var h, Var w, Var b) {
  return ad::leaky_relu(ad::add(ad::spmm(a_hat, ad::matmul(h, w)), b), kGcnSlope);
}

Var residual_gcn(const ad::SparseMatrix& a_hat, Var h, Var w, Var b) {
  if (w.rows() != w.cols()) throw DataError("residual block weight must be square");
  return ad::add(h, gcn_layer(a_hat, h, w, b));
}

Var gat_layer(std::span<const int> src, std::span<const int> dst, Var h, std::span<const GatHead> heads) {
  if (src.size() != dst.size()) throw DataError("attention edge lists differ in length");
  const int n = h.rows();
  std::vector<Var> outs;
  for (const GatHead& hd : heads) {
    const Var z = ad::matmul(h, hd.w);
    const Var s_src = ad::gather_rows(ad::matmul(z, hd.a_src), src);
    const Var s_dst = ad::gather_rows(ad::matmul(z, hd.a_dst), dst);
    const Var e = ad::leaky_relu(ad::add(s_dst, s_src), kAttentionSlope);
    const Var alpha = ad::segment_softmax(e, dst, n);
    const Var msg = ad::mul_rows(ad::gather_rows(z, src), alpha);
    outs.push_back(ad::segment_sum(msg, dst, n));
  }
  return outs.size() == 1 ? outs[0] : ad::concat_cols(outs);
}

Var global_mean_pool(Var h, std::span<const int> graph_ids, int num_graphs) {
  return ad::segment_mean(h, graph_ids, num_graphs);
}

Var model_forward(const ModelConfig& config, std::span<const Var> params, const GraphBatch& batch) {
  const auto specs = param_specs(config);
  if (params.size() != specs.size()) throw DataError("parameter count does not match the config");
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (params[i].rows() != specs[i].rows || params[i].cols() != specs[i].cols) {
      throw DataError("parameter " + specs[i].name + " has the wrong shape");
    }
  }
  if (batch.num_graphs == 0) throw DataError("empty batch");
  ad::Tape& tape = *params[0].tape;
  const Var x = tape.constant(batch.features);
  std::size_t p = 0;
  Var h;
  if (config.first_layer == FirstLayer::GAT) {
    std::vector<GatHead> heads;
    for (int k = 0; k < config.heads; ++k, p += 3) heads.push_back({params[p], params[p + 1], params[p + 2]});
    h = gat_layer(batch.att_src, batch.att_dst, x, heads);
  } else {
    h = gcn_layer(batch.adjacency, x, params[0], params[1]);
    p = 2;
  }
  for (int i = 0; i < config.residual_blocks; ++i, p += 2) {
    h = residual_gcn(batch.adjacency, h, params[p], params[p + 1]);
  }
  h = global_mean_pool(h, batch.graph_ids, batch.num_graphs);
  for (std::size_t i = 0; i < config.ffnn_hidden.size(); ++i, p += 2) {
    h = ad::leaky_relu(ad::add(ad::matmul(h, params[p]), params[p + 1]), kGcnSlope);
  }
  return ad::row_softmax(ad::add(ad::matmul(h, params[p]), params[p + 1]));
}

ad::Tensor predict(const Model& m, const GraphBatch& batch) {
  ad::Tape tape;
  std::vector<Var> vars;
  for (const auto& t : m.params) vars.push_back(tape.constant(t));
  return model_forward(m.config, vars, batch).value();
}

}  // namespace qtp
