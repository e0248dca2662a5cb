#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mplx/data.hpp"
#include "mplx/model.hpp"

namespace mplx {

using Track = std::vector<Vec2>;        // one agent's positions over time
using Tracks = std::vector<Track>;      // [agent][time]

/// Average displacement error over all agents and prediction steps.
inline double ade(const Tracks& pred, const Tracks& truth) {
  if (pred.size() != truth.size() || pred.empty())
    throw ShapeError("ade: track count mismatch");
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i].size() != truth[i].size())
      throw ShapeError("ade: track length mismatch");
    for (std::size_t t = 0; t < pred[i].size(); ++t) {
      acc += norm(pred[i][t] - truth[i][t]);
      ++count;
    }
  }
  return acc / static_cast<double>(count);
}

/// Displacement error at the last predicted step only.
inline double fde(const Tracks& pred, const Tracks& truth) {
  if (pred.size() != truth.size() || pred.empty())
    throw ShapeError("fde: track count mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i].empty() || pred[i].size() != truth[i].size())
      throw ShapeError("fde: track length mismatch");
    acc += norm(pred[i].back() - truth[i].back());
  }
  return acc / static_cast<double>(pred.size());
}

/// Row-argmax edge recovery: fraction of agents whose strongest incoming
/// weight points at their true leader. Ties break to the lowest index.
inline double graph_accuracy(const Tensor& z_layer, const LeaderGraph& gt) {
  std::size_t n = z_layer.rows();
  if (z_layer.cols() != n || gt.leader.size() != n)
    throw ShapeError("graph_accuracy: shape mismatch");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t arg = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (z_layer.at(i, j) > best) {
        best = z_layer.at(i, j);
        arg = j;
      }
    }
    if (static_cast<int>(arg) == gt.leader[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

namespace detail {

/// Descending rank labels (1 = largest) of a row's off-diagonal entries,
/// ties broken by column index.
inline std::vector<int> row_ranks(const Tensor& z, std::size_t row) {
  std::size_t n = z.cols();
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < n; ++j)
    if (j != row) cols.push_back(j);
  std::vector<std::size_t> order = cols;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return z.at(row, a) > z.at(row, b);
  });
  std::vector<int> rank(n, 0);
  for (std::size_t r = 0; r < order.size(); ++r)
    rank[order[r]] = static_cast<int>(r) + 1;
  std::vector<int> out;
  for (std::size_t j : cols) out.push_back(rank[j]);
  return out;
}

/// Plugin mutual information / entropies of two equal-length label vectors.
inline double discrete_nmi(const std::vector<int>& u, const std::vector<int>& v) {
  std::size_t n = u.size();
  std::map<int, double> pu, pv;
  std::map<std::pair<int, int>, double> puv;
  for (std::size_t i = 0; i < n; ++i) {
    pu[u[i]] += 1.0;
    pv[v[i]] += 1.0;
    puv[{u[i], v[i]}] += 1.0;
  }
  double hu = 0.0, hv = 0.0, mi = 0.0;
  double inv_n = 1.0 / static_cast<double>(n);
  for (auto& [_, c] : pu) hu -= c * inv_n * std::log(c * inv_n);
  for (auto& [_, c] : pv) hv -= c * inv_n * std::log(c * inv_n);
  for (auto& [uv, c] : puv) {
    double pj = c * inv_n;
    mi += pj * std::log(pj / (pu[uv.first] * inv_n * pv[uv.second] * inv_n));
  }
  if (hu <= 0.0 && hv <= 0.0) return 1.0;  // two constant labelings
  double denom = std::sqrt(hu * hv);
  if (denom <= 0.0) return 0.0;
  return mi / denom;
}

}  // namespace detail

/// Rank-discretized dependency score between two latent layers: each row's
/// off-diagonal weights become rank labels; the labels of all rows are pooled
/// and scored with NMI (geometric-mean normalization). 1 = fully dependent.
inline double nmi_score(const Tensor& z1, const Tensor& z2) {
  if (!z1.same_shape(z2) || z1.rank() != 2 || z1.rows() != z1.cols())
    throw ShapeError("nmi_score: need two equal square matrices");
  std::size_t n = z1.rows();
  std::vector<int> u, v;
  for (std::size_t i = 0; i < n; ++i) {
    auto ru = detail::row_ranks(z1, i);
    auto rv = detail::row_ranks(z2, i);
    u.insert(u.end(), ru.begin(), ru.end());
    v.insert(v.end(), rv.begin(), rv.end());
  }
  return detail::discrete_nmi(u, v);
}

// -- whole-model evaluation -------------------------------------------------

struct PerEpisodeEval {
  std::uint64_t episode_seed = 0;
  double ade = 0.0;
  double fde = 0.0;
  int correct_rows = 0;  // headline layer
  int n_rows = 0;
};

struct EvalReport {
  double ade = 0.0;
  double fde = 0.0;
  std::vector<double> graph_accuracy;  // per latent layer
  double nmi = 0.0;                    // layers 1 vs 2, 0 when K < 2
  double stand_still_ade = 0.0;        // predict-last-observed baseline
  double chance_accuracy = 0.0;        // 1 / (N - 1)
  int headline_layer = 0;
  std::vector<PerEpisodeEval> per_episode;

  double headline_accuracy() const {
    return graph_accuracy.at(static_cast<std::size_t>(headline_layer));
  }
  double best_layer_accuracy() const {
    return *std::max_element(graph_accuracy.begin(), graph_accuracy.end());
  }

  json to_json() const {
    json j{{"ade", ade},
           {"fde", fde},
           {"graph_accuracy", graph_accuracy},
           {"headline_layer", headline_layer},
           {"nmi", nmi},
           {"stand_still_ade", stand_still_ade},
           {"chance_accuracy", chance_accuracy},
           {"episodes", per_episode.size()}};
    return j;
  }

  void write_csv(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write eval csv: " + path);
    f << "episode_seed,ade,fde,correct_rows,n_rows\n";
    for (const auto& e : per_episode)
      f << e.episode_seed << "," << f64_str(e.ade) << "," << f64_str(e.fde)
        << "," << e.correct_rows << "," << e.n_rows << "\n";
  }
};

inline Tracks truth_future(const Episode& ep, const ModelConfig& cfg) {
  Tracks out;
  for (const auto& track : ep.positions)
    out.emplace_back(track.begin() + cfg.t_obs, track.end());
  return out;
}

inline Tracks stand_still_prediction(const Episode& ep, const ModelConfig& cfg) {
  Tracks out;
  for (const auto& track : ep.positions)
    out.emplace_back(static_cast<std::size_t>(cfg.t_pred), track[cfg.t_obs - 1]);
  return out;
}

/// Evaluates a trained model over episodes: ADE/FDE in world units, per-layer
/// graph accuracy, inter-layer NMI. Headline layer: first latent layer for
/// multiplex models, best layer otherwise.
inline EvalReport evaluate(const Model& m, const std::vector<const Episode*>& eps,
                           int jobs = 1) {
  if (eps.empty()) throw ConfigError("evaluate: no episodes");
  EvalReport rep;
  int k = m.cfg.k_layers;
  rep.graph_accuracy.assign(static_cast<std::size_t>(k), 0.0);

  struct Slot {
    PerEpisodeEval pe;
    std::vector<double> layer_acc;
    double nmi = 0.0;
    double stand_still = 0.0;
  };
  std::vector<Slot> slots(eps.size());
  parallel_for(eps.size(), jobs, [&](std::size_t e) {
    const Episode* ep = eps[e];
    Slot& s = slots[e];
    Tape tape;
    ParamBinding p(tape, const_cast<ParamStore&>(m.store), false);
    EpisodeForward fwd = episode_forward(p, m, *ep);
    Tracks pred = predictions_world(tape, fwd.roll, m.cfg);
    Tracks truth = truth_future(*ep, m.cfg);
    s.pe.episode_seed = ep->seed;
    s.pe.ade = ade(pred, truth);
    s.pe.fde = fde(pred, truth);
    s.pe.n_rows = static_cast<int>(ep->positions.size());
    auto z = latent_values(tape, fwd.z);
    for (int layer = 0; layer < k; ++layer)
      s.layer_acc.push_back(
          graph_accuracy(z[static_cast<std::size_t>(layer)], ep->leaders));
    s.pe.correct_rows =
        static_cast<int>(std::lround(s.layer_acc[0] * s.pe.n_rows));
    if (k >= 2) s.nmi = nmi_score(z[0], z[1]);
    s.stand_still = ade(stand_still_prediction(*ep, m.cfg), truth);
  });
  double nmi_acc = 0.0;
  for (const Slot& s : slots) {  // reduce in episode order: jobs-independent
    for (int layer = 0; layer < k; ++layer)
      rep.graph_accuracy[static_cast<std::size_t>(layer)] +=
          s.layer_acc[static_cast<std::size_t>(layer)];
    nmi_acc += s.nmi;
    rep.ade += s.pe.ade;
    rep.fde += s.pe.fde;
    rep.stand_still_ade += s.stand_still;
    rep.per_episode.push_back(s.pe);
  }
  double inv = 1.0 / static_cast<double>(eps.size());
  rep.ade *= inv;
  rep.fde *= inv;
  rep.stand_still_ade *= inv;
  rep.nmi = k >= 2 ? nmi_acc * inv : 0.0;
  for (auto& a : rep.graph_accuracy) a *= inv;
  rep.chance_accuracy = 1.0 / static_cast<double>(eps[0]->positions.size() - 1);
  rep.headline_layer =
      m.cfg.mode == GraphMode::multiplex
          ? 0
          : static_cast<int>(std::max_element(rep.graph_accuracy.begin(),
                                              rep.graph_accuracy.end()) -
                             rep.graph_accuracy.begin());
  return rep;
}

// -- counterfactual generation ----------------------------------------------

struct GraphEdit {
  int layer = 0;  // 0-based latent layer
  int row = 0;    // agent whose incoming row is replaced
  int col = 0;    // new one-hot target (the new leader)
};

struct CounterfactualResult {
  Tracks original;
  Tracks edited;
  std::vector<Tensor> z_before;
  std::vector<Tensor> z_after;
};

/// Applies a one-hot row replacement to the edited layer only. Edits are
/// layer-local: other layers are never touched, so in a skip-layer-1 model an
/// edit to layer 1 is guaranteed to leave predictions unchanged. Sigmoid
/// values are kept strictly inside (0,1).
inline std::vector<Tensor> apply_graph_edits(std::vector<Tensor> z, GraphMode mode,
                                             const std::vector<GraphEdit>& edits) {
  for (const GraphEdit& e : edits) {
    if (e.layer < 0 || e.layer >= static_cast<int>(z.size()))
      throw ConfigError("graph edit: layer out of range");
    Tensor& layer = z[static_cast<std::size_t>(e.layer)];
    std::size_t n = layer.rows();
    if (e.row < 0 || e.row >= static_cast<int>(n) || e.col < 0 ||
        e.col >= static_cast<int>(n) || e.row == e.col)
      throw ConfigError("graph edit: invalid row/col");
    std::size_t i = static_cast<std::size_t>(e.row);
    std::size_t j = static_cast<std::size_t>(e.col);
    if (mode == GraphMode::sigmoid) {
      const double lo = 1e-6, hi = 1.0 - 1e-6;
      for (std::size_t s = 0; s < n; ++s)
        if (s != i) layer.at(i, s) = (s == j) ? hi : lo;
    } else {
      for (std::size_t s = 0; s < n; ++s) layer.at(i, s) = 0.0;
      layer.at(i, j) = 1.0;
    }
  }
  return z;
}

/// Conditional generation with an edited latent graph: encode once, decode
/// with the original and the edited graph.
inline CounterfactualResult counterfactual_rollout(const Model& m, const Episode& ep,
                                                   const std::vector<GraphEdit>& edits) {
  CounterfactualResult out;
  Tape tape;
  ParamBinding p(tape, const_cast<ParamStore&>(m.store), false);
  EpisodeForward fwd = episode_forward(p, m, ep);
  out.original = predictions_world(tape, fwd.roll, m.cfg);
  out.z_before = latent_values(tape, fwd.z);
  out.z_after = apply_graph_edits(out.z_before, m.cfg.mode, edits);
  Tape tape2;
  ParamBinding p2(tape2, const_cast<ParamStore&>(m.store), false);
  RolloutVars roll2 = rollout_with_graph(p2, m, ep, out.z_after);
  out.edited = predictions_world(tape2, roll2, m.cfg);
  return out;
}

// -- zero-shot generalization sweep -------------------------------------------

struct SweepScenario {
  std::string name;
  EnvConfig env;
};

inline std::vector<SweepScenario> standard_scenarios(EnvConfig base) {
  SweepScenario fast{"2x_speed", base};
  fast.env.speed_multiplier *= 2.0;
  SweepScenario small{"2x_smaller", base};
  small.env.arena_scale *= 0.5;
  SweepScenario crowded{"2x_agents", base};
  crowded.env.n_agents *= 2;
  return {fast, small, crowded};
}

/// Evaluates the trained model zero-shot on freshly simulated scenario
/// datasets (no retraining; architecture is agent-count agnostic).
inline std::map<std::string, EvalReport> generalization_sweep(
    const Model& m, const std::vector<SweepScenario>& scenarios,
    std::size_t episodes_per_scenario, std::uint64_t seed, int jobs = 1) {
  std::map<std::string, EvalReport> out;
  for (const auto& sc : scenarios) {
    sc.env.validate();
    std::vector<Episode> eps(episodes_per_scenario);
    parallel_for(episodes_per_scenario, jobs, [&](std::size_t i) {
      eps[i] = simulate_episode(sc.env, derive_seed(seed ^ fnv1a(sc.name), i));
    });
    std::vector<const Episode*> ptrs;
    for (const auto& e : eps) ptrs.push_back(&e);
    out[sc.name] = evaluate(m, ptrs, jobs);
  }
  return out;
}

}  // namespace mplx
