#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mplx/data.hpp"
#include "mplx/model.hpp"

namespace mplx {

enum class TrainMode { sg, mg, mg_plt, edge_type, edge_type_skip1, sigmoid };

inline std::string to_string(TrainMode m) {
  switch (m) {
    case TrainMode::sg: return "sg";
    case TrainMode::mg: return "mg";
    case TrainMode::mg_plt: return "mg-plt";
    case TrainMode::edge_type: return "edge-type";
    case TrainMode::edge_type_skip1: return "edge-type-skip1";
    case TrainMode::sigmoid: return "sigmoid";
  }
  return "?";
}

inline TrainMode train_mode_from_string(const std::string& s) {
  if (s == "sg") return TrainMode::sg;
  if (s == "mg") return TrainMode::mg;
  if (s == "mg-plt") return TrainMode::mg_plt;
  if (s == "edge-type") return TrainMode::edge_type;
  if (s == "edge-type-skip1") return TrainMode::edge_type_skip1;
  if (s == "sigmoid") return TrainMode::sigmoid;
  throw ConfigError("unknown training mode: " + s);
}

struct TrainConfig {
  TrainMode mode = TrainMode::mg_plt;
  int k_layers = 2;
  int hidden = 32;
  double lr_init = 1e-3;
  double plateau_decay = 0.9;
  int plateau_patience = 5;
  int stop_patience = 20;
  int batch_size = 64;
  int fade_in_steps = 500;
  bool fade_in_epochs = false;  // count the ramp in epochs instead of steps
  int max_epochs = 200;
  double dropout = 0.0;  // hidden-activation dropout during training passes
  std::uint64_t seed = 0;

  /// Hyperparameters as published: lr 1e-6, stopping patience 100 epochs.
  void apply_paper_hparams() {
    lr_init = 1e-6;
    stop_patience = 100;
  }

  void validate() const {
    if (mode == TrainMode::sg && k_layers != 1)
      throw ConfigError("sg mode requires k_layers == 1");
    if (k_layers < 1 || hidden < 1 || batch_size < 1 || max_epochs < 1)
      throw ConfigError("train config: counts must be positive");
    if (lr_init <= 0 || plateau_decay <= 0 || plateau_decay >= 1)
      throw ConfigError("train config: bad learning-rate settings");
    if (fade_in_steps < 1) throw ConfigError("fade_in_steps must be >= 1");
    if (dropout < 0.0 || dropout >= 1.0)
      throw ConfigError("train config: dropout must be in [0,1)");
  }

  ModelConfig model_config(const EnvConfig& env) const {
    ModelConfig mc;
    mc.k_layers = k_layers;
    mc.hidden = hidden;
    mc.t_obs = env.t_obs;
    mc.t_pred = env.t_pred;
    mc.pos_scale = env.arena_radius;
    switch (mode) {
      case TrainMode::sg:
      case TrainMode::mg:
      case TrainMode::mg_plt:
        mc.mode = GraphMode::multiplex;
        break;
      case TrainMode::edge_type:
        mc.mode = GraphMode::edge_type;
        break;
      case TrainMode::edge_type_skip1:
        mc.mode = GraphMode::edge_type;
        mc.skip_first_layer = true;
        break;
      case TrainMode::sigmoid:
        mc.mode = GraphMode::sigmoid;
        break;
    }
    return mc;
  }
};

/// Batch objective: mean squared prediction error averaged over episodes.
inline Var compute_loss(ParamBinding& p, const Model& m,
                        const std::vector<const Episode*>& batch,
                        double alpha = -1.0, int new_stage = -1) {
  if (batch.empty()) throw ConfigError("compute_loss: empty batch");
  Tape& t = p.tape();
  Var acc;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    Var l = episode_loss(p, m, *batch[i], alpha, new_stage);
    acc = i == 0 ? l : t.add(acc, l);
  }
  return t.scale(acc, 1.0 / static_cast<double>(batch.size()));
}

struct EpochLog {
  int epoch = 0;   // global epoch counter across stages
  int stage = 0;
  double alpha = 1.0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;
};

struct StageBoundary {
  int stage = 0;
  int epoch_begin = 0;
  double entry_val_loss = 0.0;
};

struct TrainResult {
  Model model;
  std::vector<EpochLog> log;
  std::vector<StageBoundary> lineage;
  double best_val = std::numeric_limits<double>::infinity();
  bool hit_max_epochs = false;
};

/// Shared training machinery: shuffled minibatch Adam epochs, plateau decay,
/// early stopping with best-validation restore, optional fade-in schedule.
class Trainer {
 public:
  Trainer(const Dataset& data, const TrainConfig& cfg)
      : data_(data), cfg_(cfg), shuffle_rng_(cfg.seed, "shuffle"),
        dropout_rng_(cfg.seed, "dropout") {
    cfg_.validate();
    train_idx_ = data.split_indices("train");
    val_idx_ = data.split_indices("val");
    if (train_idx_.empty() || val_idx_.empty())
      throw ConfigError("dataset has an empty train or val split");
  }

  /// Optional: write per-epoch CSV and stage/best checkpoints under dir.
  void set_output_dir(const std::string& dir) { out_dir_ = dir; }

  TrainResult train() {
    TrainResult res;
    if (cfg_.mode == TrainMode::mg_plt) {
      res.model = Model::init(cfg_.model_config(data_.env), cfg_.seed, 1);
      run_stage(res, 1, false);
      for (int k = 2; k <= cfg_.k_layers; ++k) {
        res.model.grow_stage(k, cfg_.seed);
        run_stage(res, k, true);
      }
    } else {
      ModelConfig mc = cfg_.model_config(data_.env);
      // Model::init sets active_stages: k_layers for multiplex-all-at-once
      // (MG/SG) and for the joint modes alike
      res.model = Model::init(mc, cfg_.seed, cfg_.k_layers);
      run_stage(res, cfg_.k_layers, false);
    }
    if (!out_dir_.empty()) {
      save_checkpoint(res, out_dir_ + "/best.ckpt");
      write_log_csv(res, out_dir_ + "/train_log.csv");
    }
    return res;
  }

  /// Validation MSE at the model's current parameters and fade state.
  double validation_loss(const Model& m, double alpha = -1.0,
                         int new_stage = -1) const {
    return dataset_loss(m, val_idx_, alpha, new_stage);
  }

  double dataset_loss(const Model& m, const std::vector<std::size_t>& idx,
                      double alpha = -1.0, int new_stage = -1) const {
    double acc = 0.0;
    for (std::size_t i : idx) {
      Tape tape;
      ParamBinding p(tape, const_cast<ParamStore&>(m.store), false);
      acc += tape.value(episode_loss(p, m, data_.episodes[i], alpha, new_stage))
                 .item();
    }
    return acc / static_cast<double>(idx.size());
  }

  void save_checkpoint(const TrainResult& res, const std::string& path) const {
    res.model.store.save(path);
    json side{{"mode", to_string(cfg_.mode)},
              {"graph_mode", to_string(res.model.cfg.mode)},
              {"k_layers", res.model.cfg.k_layers},
              {"hidden", res.model.cfg.hidden},
              {"t_obs", res.model.cfg.t_obs},
              {"t_pred", res.model.cfg.t_pred},
              {"pos_scale", res.model.cfg.pos_scale},
              {"skip_first_layer", res.model.cfg.skip_first_layer},
              {"active_stages", res.model.active_stages},
              {"alpha", res.model.fade_alpha},
              {"fade_stage", res.model.fade_stage},
              {"epoch", res.log.empty() ? 0 : res.log.back().epoch},
              {"best_val", res.best_val},
              {"seed", cfg_.seed},
              {"lr_init", cfg_.lr_init},
              {"batch_size", cfg_.batch_size},
              {"stage_lineage", json::array()}};
    for (const auto& b : res.lineage)
      side["stage_lineage"].push_back({{"stage", b.stage},
                                       {"epoch_begin", b.epoch_begin},
                                       {"entry_val_loss", b.entry_val_loss}});
    std::ofstream f(path + ".json");
    if (!f) throw IoError("cannot write sidecar: " + path + ".json");
    f << side.dump(2) << "\n";
  }

 private:
  void run_stage(TrainResult& res, int stage, bool fade_in) {
    Model& m = res.model;
    m.fade_stage = fade_in ? stage : 0;
    m.fade_alpha = fade_in ? 0.0 : 1.0;
    std::int64_t steps_done = 0;
    int epochs_done = 0;
    auto current_alpha = [&]() {
      if (!fade_in) return 1.0;
      double progress = cfg_.fade_in_epochs
                            ? static_cast<double>(epochs_done) / cfg_.fade_in_steps
                            : static_cast<double>(steps_done) / cfg_.fade_in_steps;
      return std::min(1.0, progress);
    };

    double entry_val = validation_loss(m);
    res.lineage.push_back({stage, next_epoch_, entry_val});

    double lr = cfg_.lr_init;
    double best = entry_val;
    double best_alpha = m.fade_alpha;
    auto best_snap = m.store.snapshot_values();
    int since_improve = 0;
    int since_decay = 0;

    for (int epoch = 0; epoch < cfg_.max_epochs; ++epoch) {
      shuffle_rng_.shuffle(train_idx_);
      double train_acc = 0.0;
      std::size_t n_batches = 0;
      for (std::size_t start = 0; start < train_idx_.size();
           start += static_cast<std::size_t>(cfg_.batch_size)) {
        m.fade_alpha = current_alpha();
        std::vector<const Episode*> batch;
        for (std::size_t i = start;
             i < std::min(train_idx_.size(),
                          start + static_cast<std::size_t>(cfg_.batch_size));
             ++i)
          batch.push_back(&data_.episodes[train_idx_[i]]);
        Tape tape;
        ParamBinding p(tape, m.store, true);
        p.enable_dropout(cfg_.dropout, &dropout_rng_);
        Var loss = compute_loss(p, m, batch, m.fade_alpha, m.fade_stage);
        double lv = tape.value(loss).item();
        if (!std::isfinite(lv))
          throw NumericError("training aborted: non-finite loss at stage " +
                             std::to_string(stage) + " step " +
                             std::to_string(steps_done) + " lr " +
                             std::to_string(lr));
        tape.backward(loss);
        m.store.adam_step(p.grads(), lr);
        train_acc += lv;
        ++n_batches;
        ++steps_done;
      }
      ++epochs_done;
      m.fade_alpha = current_alpha();
      double val = validation_loss(m);
      res.log.push_back({next_epoch_++, stage, m.fade_alpha,
                         train_acc / static_cast<double>(n_batches), val, lr});

      if (val < best - 1e-12) {
        best = val;
        best_alpha = m.fade_alpha;
        best_snap = m.store.snapshot_values();
        since_improve = 0;
        since_decay = 0;
      } else {
        ++since_improve;
        ++since_decay;
        if (since_decay >= cfg_.plateau_patience) {
          lr *= cfg_.plateau_decay;
          since_decay = 0;
        }
        if (since_improve >= cfg_.stop_patience) break;
      }
      if (epoch + 1 == cfg_.max_epochs) {
        res.hit_max_epochs = true;
        std::cerr << "warning: stage " << stage << " hit max_epochs before "
                  << "convergence\n";
      }
    }

    m.store.restore_values(best_snap);
    m.fade_alpha = best_alpha;
    res.best_val = best;
    if (!out_dir_.empty())
      save_checkpoint(res, out_dir_ + "/stage" + std::to_string(stage) + ".ckpt");
  }

  void write_log_csv(const TrainResult& res, const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write log: " + path);
    f << "epoch,stage,alpha,train_loss,val_loss,lr\n";
    for (const auto& e : res.log)
      f << e.epoch << "," << e.stage << "," << f64_str(e.alpha) << ","
        << f64_str(e.train_loss) << "," << f64_str(e.val_loss) << ","
        << f64_str(e.lr) << "\n";
  }

  const Dataset& data_;
  TrainConfig cfg_;
  std::vector<std::size_t> train_idx_, val_idx_;
  Rng shuffle_rng_;
  Rng dropout_rng_;
  std::string out_dir_;
  int next_epoch_ = 0;
};

/// PLT entry point: stage 1 to convergence, then grow-freeze-fade per layer.
inline TrainResult plt_train(const Dataset& data, const TrainConfig& cfg,
                             const std::string& out_dir = "") {
  if (cfg.mode != TrainMode::mg_plt)
    throw ConfigError("plt_train requires mode mg-plt");
  Trainer tr(data, cfg);
  if (!out_dir.empty()) tr.set_output_dir(out_dir);
  return tr.train();
}

/// Single-phase training for all non-PLT modes.
inline TrainResult run_baseline(const Dataset& data, const TrainConfig& cfg,
                                const std::string& out_dir = "") {
  if (cfg.mode == TrainMode::mg_plt)
    throw ConfigError("run_baseline cannot run mg-plt");
  Trainer tr(data, cfg);
  if (!out_dir.empty()) tr.set_output_dir(out_dir);
  return tr.train();
}

/// Rebuilds a Model from a checkpoint and its sidecar JSON.
inline Model load_model(const std::string& ckpt_path) {
  std::ifstream f(ckpt_path + ".json");
  if (!f) throw IoError("cannot open sidecar: " + ckpt_path + ".json");
  json side = json::parse(f);
  Model m;
  m.cfg.mode = graph_mode_from_string(side.at("graph_mode").get<std::string>());
  m.cfg.k_layers = side.at("k_layers").get<int>();
  m.cfg.hidden = side.at("hidden").get<int>();
  m.cfg.t_obs = side.at("t_obs").get<int>();
  m.cfg.t_pred = side.at("t_pred").get<int>();
  m.cfg.pos_scale = side.at("pos_scale").get<double>();
  m.cfg.skip_first_layer = side.at("skip_first_layer").get<bool>();
  m.active_stages = side.at("active_stages").get<int>();
  m.fade_alpha = side.at("alpha").get<double>();
  m.fade_stage = side.at("fade_stage").get<int>();
  m.store = ParamStore::load(ckpt_path);
  return m;
}

}  // namespace mplx
