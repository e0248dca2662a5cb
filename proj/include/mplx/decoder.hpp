#pragma once

#include <string>
#include <vector>

#include "mplx/nn.hpp"
#include "mplx/tape.hpp"

namespace mplx {

inline std::string decoder_edge_prefix(int layer) {
  return "dec.edge." + std::to_string(layer);
}

/// Registers the decoder: agent-centric embedding, per-layer edge message
/// MLPs (added lazily for PLT via init_decoder_edge), GRU gates, readout.
inline void init_decoder(ParamStore& store, Rng& rng, std::size_t t_obs,
                         std::size_t hidden) {
  init_mlp(store, rng, "dec.emb", {t_obs * 2, hidden, hidden, hidden});
  init_mlp(store, rng, "dec.gru.z", {2 * hidden, hidden});
  init_mlp(store, rng, "dec.gru.r", {2 * hidden, hidden});
  init_mlp(store, rng, "dec.gru.h", {2 * hidden, hidden});
  init_mlp(store, rng, "dec.out", {hidden, hidden, 2});
}

inline void init_decoder_edge(ParamStore& store, Rng& rng, int layer,
                              std::size_t hidden) {
  init_mlp(store, rng, decoder_edge_prefix(layer), {2 * hidden, hidden, hidden});
}

/// h_j = f_emb(x_j): each agent embedded from its own frames only.
inline Var agent_embed(ParamBinding& p, Var x_obs) {
  return mlp_forward(p, x_obs, "dec.emb", 3, false);
}

/// MSG_j = sum_k sum_{i != j} z^k_ij f_e^k([h_i, h_j]), the new stage's term
/// scaled by the fade-in coefficient. Layers listed in `skip_layers` carry no
/// messages (RFM "skip 1" baseline); layers beyond active_layers are ignored.
inline Var graph_message(ParamBinding& p, Var h, const std::vector<Var>& z,
                         const EdgeList& edges, std::size_t n, double alpha = 1.0,
                         int new_stage = 0, int active_layers = -1,
                         bool skip_first_layer = false) {
  if (alpha < 0.0 || alpha > 1.0)
    throw ConfigError("graph_message: alpha must be in [0,1]");
  Tape& t = p.tape();
  std::size_t hidden = t.value(h).cols();
  int k_total = active_layers < 0 ? static_cast<int>(z.size()) : active_layers;
  if (k_total > static_cast<int>(z.size()))
    throw ConfigError("graph_message: latent layer count mismatch");

  std::vector<std::size_t> senders, receivers;
  senders.reserve(edges.size());
  receivers.reserve(edges.size());
  for (auto [r, s] : edges) {
    receivers.push_back(r);
    senders.push_back(s);
  }
  Var feat = t.concat_cols(t.gather_rows(h, senders), t.gather_rows(h, receivers));

  Var msg;
  bool have = false;
  for (int k = 1; k <= k_total; ++k) {
    if (skip_first_layer && k == 1) continue;
    Var m = mlp_forward(p, feat, decoder_edge_prefix(k), 2, false);
    Var term = t.graph_aggregate(m, z[static_cast<std::size_t>(k - 1)], edges, n);
    if (k == new_stage && alpha != 1.0) term = t.scale(term, alpha);
    msg = have ? t.add(msg, term) : term;
    have = true;
  }
  if (!have) msg = t.constant(Tensor::zeros({n, hidden}));
  return msg;
}

/// Standard GRU cell over [MSG, h].
inline Var gru_update(ParamBinding& p, Var msg, Var h) {
  Tape& t = p.tape();
  Var in = t.concat_cols(msg, h);
  Var zg = t.apply_activation(
      t.add_bias(t.matmul(in, p("dec.gru.z.0.W")), p("dec.gru.z.0.b")),
      Activation::sigmoid);
  Var rg = t.apply_activation(
      t.add_bias(t.matmul(in, p("dec.gru.r.0.W")), p("dec.gru.r.0.b")),
      Activation::sigmoid);
  Var cand_in = t.concat_cols(msg, t.mul(rg, h));
  Var cand = t.apply_activation(
      t.add_bias(t.matmul(cand_in, p("dec.gru.h.0.W")), p("dec.gru.h.0.b")),
      Activation::tanh);
  // h' = (1 - z) * h + z * cand
  return t.add(t.mul(t.affine(zg, -1.0, 1.0), h), t.mul(zg, cand));
}

struct RolloutVars {
  std::vector<Var> predictions;  // T_f entries, each N x 2 (normalized coords)
  std::vector<Var> hidden;       // optional inspection trace
};

/// GraphGRU rollout with residual position readout: step 1 adds to the last
/// observed position, later steps add to the previous prediction. The latent
/// graph is fixed across all steps.
inline RolloutVars rollout(ParamBinding& p, Var x_obs, Var last_obs,
                           const std::vector<Var>& z, const EdgeList& edges,
                           std::size_t n, int t_pred, double alpha = 1.0,
                           int new_stage = 0, int active_layers = -1,
                           bool skip_first_layer = false) {
  if (t_pred < 1) throw ConfigError("rollout: t_pred must be >= 1");
  Tape& t = p.tape();
  Var h = agent_embed(p, x_obs);
  Var prev = last_obs;
  RolloutVars out;
  for (int step = 0; step < t_pred; ++step) {
    Var msg = graph_message(p, h, z, edges, n, alpha, new_stage, active_layers,
                            skip_first_layer);
    h = gru_update(p, msg, h);
    Var offset = mlp_forward(p, h, "dec.out", 2, true);
    prev = t.add(prev, offset);
    out.predictions.push_back(prev);
    out.hidden.push_back(h);
  }
  return out;
}

}  // namespace mplx
