#pragma once

#include <string>
#include <vector>

#include "mplx/nn.hpp"
#include "mplx/tape.hpp"

namespace mplx {

enum class GraphMode { multiplex, edge_type, sigmoid };

inline std::string to_string(GraphMode m) {
  switch (m) {
    case GraphMode::multiplex: return "multiplex";
    case GraphMode::edge_type: return "edge_type";
    case GraphMode::sigmoid: return "sigmoid";
  }
  return "?";
}

inline GraphMode graph_mode_from_string(const std::string& s) {
  if (s == "multiplex") return GraphMode::multiplex;
  if (s == "edge_type") return GraphMode::edge_type;
  if (s == "sigmoid") return GraphMode::sigmoid;
  throw ConfigError("unknown graph mode: " + s);
}

inline std::string encoder_stage_prefix(int stage) {
  return "enc.stage" + std::to_string(stage);
}

/// Registers one encoder stage: trajectory embedding, two message-passing
/// rounds, logit head of width `out_dim` (1 for multiplex stages, K for the
/// joint edge-type/sigmoid head).
inline void init_encoder_stage(ParamStore& store, Rng& rng, int stage,
                               std::size_t t_obs, std::size_t hidden,
                               std::size_t out_dim) {
  const std::string p = encoder_stage_prefix(stage);
  init_mlp(store, rng, p + ".f_emb", {t_obs * 2, hidden, hidden, hidden});
  init_mlp(store, rng, p + ".f_e1", {2 * hidden, hidden, hidden});
  init_mlp(store, rng, p + ".f_v1", {hidden, hidden, hidden});
  init_mlp(store, rng, p + ".f_e2", {2 * hidden, hidden, hidden});
  init_mlp(store, rng, p + ".f_logit", {hidden, hidden, out_dim});
}

/// Off-diagonal 0/1 mask used to exclude self-edges from normalization.
inline Tensor offdiag_mask(std::size_t n) {
  Tensor m = Tensor::full({n, n}, 1.0);
  for (std::size_t i = 0; i < n; ++i) m.data[i * n + i] = 0.0;
  return m;
}

/// Two rounds of node<->edge message passing over the observed trajectories;
/// returns per-edge logits (E x out_dim) in full_edge_list order.
inline Var embed_edge_logits(ParamBinding& p, Var x_obs, int stage,
                             const EdgeList& edges, std::size_t n) {
  if (n < 2) throw ConfigError("embed_edge_logits: need at least 2 agents");
  Tape& t = p.tape();
  const std::string pre = encoder_stage_prefix(stage);

  std::vector<std::size_t> senders, receivers;
  senders.reserve(edges.size());
  receivers.reserve(edges.size());
  for (auto [r, s] : edges) {
    receivers.push_back(r);
    senders.push_back(s);
  }

  Var h1 = mlp_forward(p, x_obs, pre + ".f_emb", 3, false);
  Var e1 = mlp_forward(
      p, t.concat_cols(t.gather_rows(h1, senders), t.gather_rows(h1, receivers)),
      pre + ".f_e1", 2, false);
  // sum over senders per receiver
  Var ones = t.constant(offdiag_mask(n));
  Var h2 = mlp_forward(p, t.graph_aggregate(e1, ones, edges, n), pre + ".f_v1", 2,
                       false);
  Var e2 = mlp_forward(
      p, t.concat_cols(t.gather_rows(h2, senders), t.gather_rows(h2, receivers)),
      pre + ".f_e2", 2, false);
  return mlp_forward(p, e2, pre + ".f_logit", 2, true);
}

/// Per-edge scalar logits to an N x N matrix, diagonal fixed at zero and
/// excluded from any later normalization by mask.
inline Var edge_logit_matrix(Tape& t, Var logits_col, const EdgeList& edges,
                             std::size_t n) {
  return t.edges_to_matrix(logits_col, edges, n);
}

/// Normalizes stacked per-stage logit matrices into latent graph layers:
/// multiplex = row softmax over senders per layer, edge_type = softmax across
/// layers per edge, sigmoid = elementwise logistic.
inline std::vector<Var> normalize_latent(Tape& t, const std::vector<Var>& logit_cols,
                                         GraphMode mode, const EdgeList& edges,
                                         std::size_t n) {
  if (n < 2) throw ConfigError("normalize_latent: degenerate graph");
  std::vector<Var> layers;
  switch (mode) {
    case GraphMode::multiplex: {
      for (Var col : logit_cols) {
        Var m = t.edges_to_matrix(col, edges, n);
        layers.push_back(t.softmax_axis(m, 1, offdiag_mask(n)));
      }
      break;
    }
    case GraphMode::edge_type: {
      // logit_cols holds a single (E,K) tensor here
      Var z = t.softmax_axis(logit_cols.at(0), 1);
      std::size_t k_layers = t.value(logit_cols.at(0)).cols();
      for (std::size_t k = 0; k < k_layers; ++k)
        layers.push_back(t.edges_to_matrix(t.column(z, k), edges, n));
      break;
    }
    case GraphMode::sigmoid: {
      Var z = t.apply_activation(logit_cols.at(0), Activation::sigmoid);
      std::size_t k_layers = t.value(logit_cols.at(0)).cols();
      for (std::size_t k = 0; k < k_layers; ++k)
        layers.push_back(t.edges_to_matrix(t.column(z, k), edges, n));
      break;
    }
  }
  return layers;
}

/// Full encoder: runs each active stage (multiplex) or the single K-way head
/// (joint modes), stacks and normalizes. Inactive multiplex stages yield
/// all-zero layers.
inline std::vector<Var> encode(ParamBinding& p, Var x_obs, GraphMode mode,
                               int k_layers, int active_stages,
                               const EdgeList& edges, std::size_t n) {
  if (k_layers < 1) throw ConfigError("encode: need at least one latent layer");
  if (active_stages < 1 || active_stages > k_layers)
    throw ConfigError("encode: active_stages out of range");
  Tape& t = p.tape();
  std::vector<Var> layers;
  if (mode == GraphMode::multiplex) {
    std::vector<Var> cols;
    for (int k = 1; k <= active_stages; ++k)
      cols.push_back(embed_edge_logits(p, x_obs, k, edges, n));
    layers = normalize_latent(t, cols, mode, edges, n);
    for (int k = active_stages; k < k_layers; ++k)
      layers.push_back(t.constant(Tensor::zeros({n, n})));
  } else {
    Var logits = embed_edge_logits(p, x_obs, 1, edges, n);
    layers = normalize_latent(t, {logits}, mode, edges, n);
  }
  return layers;
}

}  // namespace mplx
