#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mplx/decoder.hpp"
#include "mplx/encoder.hpp"
#include "mplx/sim.hpp"

namespace mplx {

struct ModelConfig {
  GraphMode mode = GraphMode::multiplex;
  bool skip_first_layer = false;  // RFM "skip 1": layer 1 carries no messages
  int k_layers = 2;
  int hidden = 32;
  int t_obs = 24;
  int t_pred = 10;
  double pos_scale = 8.0;  // positions divided by this before embedding
};

/// Encoder + decoder parameter bundle. For multiplex models the encoder is
/// one separable stage per latent layer; stages can be grown incrementally
/// (Progressive Layer Training).
struct Model {
  ModelConfig cfg;
  ParamStore store;
  int active_stages = 1;
  // fade-in state of the newest stage; 1.0 / 0 once fully blended
  double fade_alpha = 1.0;
  int fade_stage = 0;

  static Model init(const ModelConfig& cfg, std::uint64_t seed,
                    int initial_stages) {
    if (cfg.k_layers < 1) throw ConfigError("Model: k_layers must be >= 1");
    Model m;
    m.cfg = cfg;
    Rng rng(seed, "init");
    init_decoder(m.store, rng, static_cast<std::size_t>(cfg.t_obs),
                 static_cast<std::size_t>(cfg.hidden));
    if (cfg.mode == GraphMode::multiplex) {
      m.active_stages = initial_stages;
      for (int k = 1; k <= initial_stages; ++k) m.add_stage_params(k, rng);
    } else {
      // joint modes: one encoder with a K-way head, all decoder edge MLPs
      m.active_stages = cfg.k_layers;
      init_encoder_stage(m.store, rng, 1, static_cast<std::size_t>(cfg.t_obs),
                         static_cast<std::size_t>(cfg.hidden),
                         static_cast<std::size_t>(cfg.k_layers));
      for (int k = 1; k <= cfg.k_layers; ++k)
        init_decoder_edge(m.store, rng, k, static_cast<std::size_t>(cfg.hidden));
    }
    return m;
  }

  /// Fresh parameters for multiplex stage k and its decoder message head.
  void add_stage_params(int k, Rng& rng) {
    init_encoder_stage(store, rng, k, static_cast<std::size_t>(cfg.t_obs),
                       static_cast<std::size_t>(cfg.hidden), 1);
    init_decoder_edge(store, rng, k, static_cast<std::size_t>(cfg.hidden));
  }

  /// Grows the next stage (PLT): freezes all previous stages' encoders and
  /// message heads, instantiates stage `k` fresh.
  void grow_stage(int k, std::uint64_t seed) {
    if (cfg.mode != GraphMode::multiplex)
      throw ConfigError("grow_stage: only multiplex models grow");
    if (k != active_stages + 1 || k > cfg.k_layers)
      throw ConfigError("grow_stage: stages must grow one at a time");
    for (int prev = 1; prev < k; ++prev) {
      store.freeze_prefix(encoder_stage_prefix(prev) + ".");
      store.freeze_prefix(decoder_edge_prefix(prev) + ".");
    }
    Rng rng(seed, "init.stage" + std::to_string(k));
    add_stage_params(k, rng);
    active_stages = k;
  }
};

// -- episode feature assembly -------------------------------------------

/// Observed frames as N x (T_h * 2), normalized by pos_scale.
inline Tensor obs_tensor(const Episode& ep, const ModelConfig& cfg) {
  std::size_t n = ep.positions.size();
  Tensor x = Tensor::zeros({n, static_cast<std::size_t>(cfg.t_obs) * 2});
  for (std::size_t i = 0; i < n; ++i)
    for (int t = 0; t < cfg.t_obs; ++t) {
      x.data[i * cfg.t_obs * 2 + 2 * t] = ep.positions[i][t].x / cfg.pos_scale;
      x.data[i * cfg.t_obs * 2 + 2 * t + 1] = ep.positions[i][t].y / cfg.pos_scale;
    }
  return x;
}

inline Tensor last_obs_tensor(const Episode& ep, const ModelConfig& cfg) {
  std::size_t n = ep.positions.size();
  Tensor x = Tensor::zeros({n, 2});
  for (std::size_t i = 0; i < n; ++i) {
    x.data[i * 2] = ep.positions[i][cfg.t_obs - 1].x / cfg.pos_scale;
    x.data[i * 2 + 1] = ep.positions[i][cfg.t_obs - 1].y / cfg.pos_scale;
  }
  return x;
}

/// Ground-truth future position at prediction step (0-based), normalized.
inline Tensor target_tensor(const Episode& ep, const ModelConfig& cfg, int step) {
  std::size_t n = ep.positions.size();
  Tensor x = Tensor::zeros({n, 2});
  for (std::size_t i = 0; i < n; ++i) {
    x.data[i * 2] = ep.positions[i][cfg.t_obs + step].x / cfg.pos_scale;
    x.data[i * 2 + 1] = ep.positions[i][cfg.t_obs + step].y / cfg.pos_scale;
  }
  return x;
}

struct EpisodeForward {
  std::vector<Var> z;  // K latent layers, N x N
  RolloutVars roll;
};

/// Encoder on the observed window, GraphGRU rollout over the inferred graph.
/// alpha < 0 means "use the model's own fade-in state".
inline EpisodeForward episode_forward(ParamBinding& p, const Model& m,
                                      const Episode& ep, double alpha = -1.0,
                                      int new_stage = -1) {
  if (alpha < 0.0) alpha = m.fade_alpha;
  if (new_stage < 0) new_stage = m.fade_stage;
  Tape& t = p.tape();
  std::size_t n = ep.positions.size();
  EdgeList edges = full_edge_list(n);
  Var x_obs = t.constant(obs_tensor(ep, m.cfg));
  Var last = t.constant(last_obs_tensor(ep, m.cfg));
  EpisodeForward out;
  out.z = encode(p, x_obs, m.cfg.mode, m.cfg.k_layers, m.active_stages, edges, n);
  out.roll = rollout(p, x_obs, last, out.z, edges, n, m.cfg.t_pred, alpha,
                     new_stage, m.active_stages, m.cfg.skip_first_layer);
  return out;
}

/// Same rollout but over a caller-supplied latent graph (counterfactuals).
inline RolloutVars rollout_with_graph(ParamBinding& p, const Model& m,
                                      const Episode& ep,
                                      const std::vector<Tensor>& z_layers) {
  Tape& t = p.tape();
  std::size_t n = ep.positions.size();
  EdgeList edges = full_edge_list(n);
  Var x_obs = t.constant(obs_tensor(ep, m.cfg));
  Var last = t.constant(last_obs_tensor(ep, m.cfg));
  std::vector<Var> z;
  for (const Tensor& layer : z_layers) z.push_back(t.constant(layer));
  return rollout(p, x_obs, last, z, edges, n, m.cfg.t_pred, m.fade_alpha,
                 m.fade_stage, m.active_stages, m.cfg.skip_first_layer);
}

/// Mean squared prediction error for one episode (normalized coordinates).
inline Var episode_loss(ParamBinding& p, const Model& m, const Episode& ep,
                        double alpha = -1.0, int new_stage = -1) {
  Tape& t = p.tape();
  EpisodeForward fwd = episode_forward(p, m, ep, alpha, new_stage);
  Var acc;
  for (int step = 0; step < m.cfg.t_pred; ++step) {
    Var target = t.constant(target_tensor(ep, m.cfg, step));
    Var l = t.mse(fwd.roll.predictions[static_cast<std::size_t>(step)], target);
    acc = step == 0 ? l : t.add(acc, l);
  }
  return t.scale(acc, 1.0 / m.cfg.t_pred);
}

/// Predicted world-coordinate tracks from a finished rollout.
inline std::vector<std::vector<Vec2>> predictions_world(const Tape& t,
                                                        const RolloutVars& roll,
                                                        const ModelConfig& cfg) {
  std::size_t steps = roll.predictions.size();
  std::size_t n = t.value(roll.predictions[0]).rows();
  std::vector<std::vector<Vec2>> out(n, std::vector<Vec2>(steps));
  for (std::size_t s = 0; s < steps; ++s) {
    const Tensor& pred = t.value(roll.predictions[s]);
    for (std::size_t i = 0; i < n; ++i)
      out[i][s] = {pred.data[i * 2] * cfg.pos_scale,
                   pred.data[i * 2 + 1] * cfg.pos_scale};
  }
  return out;
}

/// Latent layers as plain tensors.
inline std::vector<Tensor> latent_values(const Tape& t, const std::vector<Var>& z) {
  std::vector<Tensor> out;
  for (Var v : z) out.push_back(t.value(v));
  return out;
}

}  // namespace mplx
