// Command-line front end: dataset generation, training, evaluation,
// counterfactual probing, and figure emission.
//
// Exit codes: 0 success, 2 config error, 3 I/O error, 4 numeric abort,
// 5 persisted-format version mismatch.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mplx/config.hpp"
#include "mplx/data.hpp"
#include "mplx/metrics.hpp"
#include "mplx/svg.hpp"
#include "mplx/trainer.hpp"

namespace fs = std::filesystem;
using namespace mplx;

namespace {

// -- config resolution --------------------------------------------------------
// Precedence: built-in default < config-file value < command-line flag.

template <typename T>
T parse_value(const std::string& s, const std::string& where) {
  std::istringstream is(s);
  T v{};
  if constexpr (std::is_same_v<T, bool>) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError(where + ": expected boolean, got '" + s + "'");
  } else if constexpr (std::is_same_v<T, std::string>) {
    return s;
  } else {
    is >> v;
    if (is.fail() || !is.eof())
      throw ConfigError(where + ": cannot parse '" + s + "'");
    return v;
  }
}

class Resolver {
 public:
  void load(const std::string& path) {
    if (!path.empty()) ini_ = parse_ini(path);
  }

  /// Overrides `target` from [section] key unless the flag was given.
  template <typename T>
  void apply(const CLI::Option* opt, const std::string& section,
             const std::string& key, T& target) const {
    if (opt && opt->count() > 0) return;
    auto sec = ini_.find(section);
    if (sec == ini_.end()) return;
    auto kv = sec->second.find(key);
    if (kv == sec->second.end()) return;
    target = parse_value<T>(kv->second, "[" + section + "] " + key);
  }

 private:
  IniSections ini_;
};

std::uint64_t fallback_seed() {
  const char* e = std::getenv("MPLX_SEED");
  return e ? parse_value<std::uint64_t>(e, "MPLX_SEED") : 0;
}

int fallback_jobs() {
  const char* e = std::getenv("MPLX_JOBS");
  return e ? parse_value<int>(e, "MPLX_JOBS") : 1;
}

void write_resolved(const std::string& dir, const json& resolved) {
  std::ofstream f(dir + "/resolved.json");
  if (!f) throw IoError("cannot write " + dir + "/resolved.json");
  f << resolved.dump(2) << "\n";
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir);
}

json env_flags_json(const EnvConfig& env) { return env_to_json(env); }

// Options shared by subcommands that take an environment.
struct EnvFlags {
  EnvConfig env;
  CLI::Option *o_agents = nullptr, *o_radius = nullptr, *o_arena = nullptr,
              *o_safety = nullptr, *o_horizon = nullptr, *o_pref = nullptr,
              *o_dt = nullptr, *o_tobs = nullptr, *o_tpred = nullptr,
              *o_speed = nullptr, *o_scale = nullptr;

  void add_to(CLI::App* cmd) {
    o_agents = cmd->add_option("--agents", env.n_agents, "number of agents");
    o_radius = cmd->add_option("--agent-radius", env.agent_radius);
    o_arena = cmd->add_option("--arena-radius", env.arena_radius);
    o_safety = cmd->add_option("--safety-space", env.safety_space);
    o_horizon = cmd->add_option("--time-horizon", env.orca_time_horizon);
    o_pref = cmd->add_option("--preferred-speed", env.preferred_speed);
    o_dt = cmd->add_option("--dt", env.dt);
    o_tobs = cmd->add_option("--t-obs", env.t_obs);
    o_tpred = cmd->add_option("--t-pred", env.t_pred);
    o_speed = cmd->add_option("--speed", env.speed_multiplier,
                              "preferred-speed multiplier");
    o_scale = cmd->add_option("--arena-scale", env.arena_scale);
  }

  void resolve(const Resolver& r) {
    r.apply(o_agents, "env", "n_agents", env.n_agents);
    r.apply(o_radius, "env", "agent_radius", env.agent_radius);
    r.apply(o_arena, "env", "arena_radius", env.arena_radius);
    r.apply(o_safety, "env", "safety_space", env.safety_space);
    r.apply(o_horizon, "env", "orca_time_horizon", env.orca_time_horizon);
    r.apply(o_pref, "env", "preferred_speed", env.preferred_speed);
    r.apply(o_dt, "env", "dt", env.dt);
    r.apply(o_tobs, "env", "t_obs", env.t_obs);
    r.apply(o_tpred, "env", "t_pred", env.t_pred);
    r.apply(o_speed, "env", "speed_multiplier", env.speed_multiplier);
    r.apply(o_scale, "env", "arena_scale", env.arena_scale);
  }
};

GraphEdit parse_edit(const std::string& spec) {
  // grammar: "k:i->j" (layer : row -> col), all non-negative integers
  std::size_t colon = spec.find(':');
  std::size_t arrow = spec.find("->");
  if (colon == std::string::npos || arrow == std::string::npos || arrow < colon)
    throw ConfigError("malformed edit spec '" + spec + "', expected k:i->j");
  GraphEdit e;
  e.layer = parse_value<int>(spec.substr(0, colon), "edit layer");
  e.row = parse_value<int>(spec.substr(colon + 1, arrow - colon - 1), "edit row");
  e.col = parse_value<int>(spec.substr(arrow + 2), "edit col");
  if (e.layer < 0 || e.row < 0 || e.col < 0)
    throw ConfigError("edit spec indices must be non-negative: " + spec);
  return e;
}

std::vector<const Episode*> split_ptrs(const Dataset& ds, const std::string& split) {
  std::vector<const Episode*> out;
  for (std::size_t i : ds.split_indices(split)) out.push_back(&ds.episodes[i]);
  if (out.empty()) throw ConfigError("dataset has no '" + split + "' episodes");
  return out;
}

// -- subcommands ---------------------------------------------------------------

int cmd_gen_data(const std::string& config_path, EnvFlags& ef, std::size_t count,
                 CLI::Option* o_count, std::uint64_t seed, CLI::Option* o_seed,
                 int jobs, CLI::Option* o_jobs, const std::string& out) {
  Resolver r;
  r.load(config_path);
  ef.resolve(r);
  r.apply(o_count, "env", "count", count);
  r.apply(o_seed, "", "seed", seed);
  r.apply(o_jobs, "", "jobs", jobs);
  ef.env.validate();
  ensure_dir(out);
  std::string data_path = out + "/dataset.jsonl";
  generate_dataset(ef.env, count, seed, data_path, jobs);
  std::string digest = file_digest(data_path);
  json manifest{{"digest", digest}, {"count", count}, {"config", env_to_json(ef.env)}};
  {
    std::ofstream f(out + "/manifest.json");
    if (!f) throw IoError("cannot write manifest: " + out + "/manifest.json");
    f << manifest.dump(2) << "\n";
  }
  write_resolved(out, json{{"subcommand", "gen-data"},
                           {"seed", seed},
                           {"jobs", jobs},
                           {"count", count},
                           {"env", env_flags_json(ef.env)}});
  std::cout << "wrote " << data_path << " (" << count << " episodes, digest "
            << digest << ")\n";
  return 0;
}

int cmd_train(const std::string& config_path, const std::string& data_path,
              const std::string& mode_str, CLI::Option* o_mode, TrainConfig tc,
              CLI::Option* o_k, CLI::Option* o_hidden, CLI::Option* o_lr,
              CLI::Option* o_batch, CLI::Option* o_epochs, CLI::Option* o_fade,
              CLI::Option* o_patience, CLI::Option* o_dropout, bool paper_hparams,
              std::uint64_t seed, CLI::Option* o_seed, const std::string& out) {
  Resolver r;
  r.load(config_path);
  std::string mode_s = mode_str;
  r.apply(o_mode, "train", "mode", mode_s);
  r.apply(o_k, "model", "k_layers", tc.k_layers);
  r.apply(o_hidden, "model", "hidden", tc.hidden);
  r.apply(o_lr, "train", "lr", tc.lr_init);
  r.apply(o_batch, "train", "batch_size", tc.batch_size);
  r.apply(o_epochs, "train", "max_epochs", tc.max_epochs);
  r.apply(o_fade, "train", "fade_in_steps", tc.fade_in_steps);
  r.apply(o_patience, "train", "patience", tc.stop_patience);
  r.apply(o_dropout, "train", "dropout", tc.dropout);
  r.apply(o_seed, "", "seed", seed);
  tc.mode = train_mode_from_string(mode_s);
  if (tc.mode == TrainMode::sg && (!o_k || o_k->count() == 0)) tc.k_layers = 1;
  if (paper_hparams) tc.apply_paper_hparams();
  tc.seed = seed;
  tc.validate();

  Dataset ds = load_dataset(data_path);
  ensure_dir(out);
  // resolved config goes out first so aborted runs are still diagnosable
  write_resolved(out, json{{"subcommand", "train"},
                           {"data", data_path},
                           {"data_digest", file_digest(data_path)},
                           {"mode", to_string(tc.mode)},
                           {"k_layers", tc.k_layers},
                           {"hidden", tc.hidden},
                           {"lr", tc.lr_init},
                           {"patience", tc.stop_patience},
                           {"plateau_patience", tc.plateau_patience},
                           {"plateau_decay", tc.plateau_decay},
                           {"batch_size", tc.batch_size},
                           {"max_epochs", tc.max_epochs},
                           {"fade_in_steps", tc.fade_in_steps},
                           {"dropout", tc.dropout},
                           {"paper_hparams", paper_hparams},
                           {"seed", seed}});
  TrainResult res = tc.mode == TrainMode::mg_plt ? plt_train(ds, tc, out)
                                                 : run_baseline(ds, tc, out);
  std::cout << "trained " << to_string(tc.mode) << ": best val loss "
            << res.best_val << " over " << res.log.size() << " epochs, "
            << res.lineage.size() << " stage(s)\n";
  return 0;
}

int cmd_eval(const std::string& config_path, const std::string& ckpt,
             const std::string& data_path, bool sweep, std::size_t sweep_episodes,
             CLI::Option* o_sweep_eps, const std::string& layer,
             CLI::Option* o_layer, std::uint64_t seed, CLI::Option* o_seed,
             int jobs, CLI::Option* o_jobs, const std::string& out) {
  Resolver r;
  r.load(config_path);
  std::string layer_s = layer;
  r.apply(o_layer, "eval", "layer", layer_s);
  r.apply(o_sweep_eps, "eval", "sweep_episodes", sweep_episodes);
  r.apply(o_seed, "", "seed", seed);
  r.apply(o_jobs, "", "jobs", jobs);

  Model m = load_model(ckpt);
  Dataset ds = load_dataset(data_path);
  EvalReport rep = evaluate(m, split_ptrs(ds, "test"), jobs);
  json report = rep.to_json();
  report["dataset_digest"] = file_digest(data_path);
  report["checkpoint_digest"] = file_digest(ckpt);
  if (layer_s != "all") {
    int sel = parse_value<int>(layer_s, "--layer");
    if (sel < 0 || sel >= static_cast<int>(rep.graph_accuracy.size()))
      throw ConfigError("--layer out of range");
    report["selected_layer_accuracy"] = rep.graph_accuracy[static_cast<std::size_t>(sel)];
  }
  if (sweep) {
    auto sweep_reports = generalization_sweep(m, standard_scenarios(ds.env),
                                              sweep_episodes, seed, jobs);
    for (auto& [name, sr] : sweep_reports) report["sweep"][name] = sr.to_json();
  }
  ensure_dir(out);
  {
    std::ofstream f(out + "/report.json");
    if (!f) throw IoError("cannot write report: " + out + "/report.json");
    f << report.dump(2) << "\n";
  }
  rep.write_csv(out + "/per_episode.csv");
  write_resolved(out, json{{"subcommand", "eval"},
                           {"ckpt", ckpt},
                           {"data", data_path},
                           {"layer", layer_s},
                           {"sweep", sweep},
                           {"sweep_episodes", sweep_episodes},
                           {"seed", seed},
                           {"jobs", jobs}});
  std::cout << "ade " << rep.ade << " fde " << rep.fde << " graph-acc(headline) "
            << rep.headline_accuracy() << " nmi " << rep.nmi << "\n";
  return 0;
}

int cmd_counterfactual(const std::string& ckpt, const std::string& data_path,
                       std::size_t episode, const std::string& split,
                       const std::vector<std::string>& edit_specs,
                       const std::string& out) {
  std::vector<GraphEdit> edits;
  for (const auto& s : edit_specs) edits.push_back(parse_edit(s));
  Model m = load_model(ckpt);
  Dataset ds = load_dataset(data_path);
  auto ptrs = split_ptrs(ds, split);
  if (episode >= ptrs.size())
    throw ConfigError("--episode out of range for split '" + split + "'");
  const Episode& ep = *ptrs[episode];
  CounterfactualResult cf = counterfactual_rollout(m, ep, edits);
  ensure_dir(out);
  counterfactual_svg(out + "/counterfactual.svg", ep, m.cfg, cf);
  auto tracks_json = [](const Tracks& tr) {
    json j = json::array();
    for (const auto& track : tr) {
      json a = json::array();
      for (Vec2 p : track) a.push_back({p.x, p.y});
      j.push_back(a);
    }
    return j;
  };
  json pair{{"episode_seed", ep.seed},
            {"edits", edit_specs},
            {"original", tracks_json(cf.original)},
            {"edited", tracks_json(cf.edited)}};
  {
    std::ofstream f(out + "/rollouts.json");
    if (!f) throw IoError("cannot write rollouts: " + out + "/rollouts.json");
    f << pair.dump(2) << "\n";
  }
  write_resolved(out, json{{"subcommand", "counterfactual"},
                           {"ckpt", ckpt},
                           {"data", data_path},
                           {"episode", episode},
                           {"split", split},
                           {"edits", edit_specs}});
  std::cout << "wrote " << out << "/counterfactual.svg\n";
  return 0;
}

struct LogCurve {
  std::string name;
  std::vector<double> train_loss, val_loss;
};

LogCurve read_log_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open log: " + path);
  std::string line;
  std::getline(f, line);  // header
  LogCurve lc;
  lc.name = fs::path(path).parent_path().filename().string();
  if (lc.name.empty()) lc.name = fs::path(path).stem().string();
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(is, cell, ',')) cells.push_back(cell);
    if (cells.size() < 6) throw IoError("malformed log row in " + path);
    lc.train_loss.push_back(parse_value<double>(cells[3], path));
    lc.val_loss.push_back(parse_value<double>(cells[4], path));
  }
  if (lc.val_loss.empty()) throw IoError("empty log: " + path);
  return lc;
}

int cmd_plot(const std::vector<std::string>& loss_logs,
             const std::vector<std::string>& points, const std::string& ckpt,
             const std::string& data_path, std::size_t episode,
             const std::string& out) {
  if (loss_logs.empty() && points.empty() && ckpt.empty())
    throw ConfigError("plot: nothing to do (need --loss, --point, or --ckpt)");
  ensure_dir(out);
  json resolved{{"subcommand", "plot"},
                {"loss", loss_logs},
                {"point", points},
                {"ckpt", ckpt},
                {"data", data_path},
                {"episode", episode}};

  if (!loss_logs.empty()) {
    std::vector<svg::Series> series;
    for (const auto& path : loss_logs) {
      LogCurve lc = read_log_csv(path);
      svg::Series tr{lc.name + " train", {}}, va{lc.name + " val", {}};
      for (std::size_t i = 0; i < lc.train_loss.size(); ++i) {
        tr.points.push_back({static_cast<double>(i), lc.train_loss[i]});
        va.points.push_back({static_cast<double>(i), lc.val_loss[i]});
      }
      series.push_back(std::move(tr));
      series.push_back(std::move(va));
    }
    svg::line_chart(out + "/loss_curves.svg", "training curves", "epoch", "mse",
                    series);
  }

  if (!points.empty()) {
    // each point: label:size:report.json — one series per label, x = size
    std::map<std::string, std::map<double, json>> by_label;
    for (const auto& p : points) {
      std::size_t c1 = p.find(':');
      std::size_t c2 = p.find(':', c1 == std::string::npos ? c1 : c1 + 1);
      if (c1 == std::string::npos || c2 == std::string::npos)
        throw ConfigError("malformed --point '" + p + "', expected label:size:report");
      std::string label = p.substr(0, c1);
      double size = parse_value<double>(p.substr(c1 + 1, c2 - c1 - 1), "--point size");
      std::string rp = p.substr(c2 + 1);
      std::ifstream f(rp);
      if (!f) throw IoError("cannot open report: " + rp);
      by_label[label][size] = json::parse(f);
    }
    auto emit = [&](const std::string& metric, const std::string& file) {
      std::vector<svg::Series> series;
      for (auto& [label, pts] : by_label) {
        svg::Series s{label, {}};
        for (auto& [size, rep] : pts) {
          double y;
          if (metric == "graph_accuracy") {
            int hl = rep.at("headline_layer").get<int>();
            y = rep.at("graph_accuracy").at(hl).get<double>();
          } else {
            y = rep.at(metric).get<double>();
          }
          s.points.push_back({size, y});
        }
        series.push_back(std::move(s));
      }
      svg::line_chart(out + "/" + file, metric + " vs dataset size",
                      "episodes", metric, series);
    };
    emit("ade", "efficiency_ade.svg");
    emit("fde", "efficiency_fde.svg");
    emit("graph_accuracy", "efficiency_accuracy.svg");
  }

  if (!ckpt.empty()) {
    if (data_path.empty()) throw ConfigError("plot --ckpt also needs --data");
    Model m = load_model(ckpt);
    Dataset ds = load_dataset(data_path);
    auto ptrs = split_ptrs(ds, "test");
    if (episode >= ptrs.size()) throw ConfigError("--episode out of range");
    Tape tape;
    ParamBinding p(tape, m.store, false);
    EpisodeForward fwd = episode_forward(p, m, *ptrs[episode]);
    auto z = latent_values(tape, fwd.z);
    double hm = 140;
    svg::Doc doc(hm + 80, (hm + 50) * static_cast<double>(z.size()) + 20);
    for (std::size_t k = 0; k < z.size(); ++k)
      svg::heatmap(doc, 20, 40 + (hm + 50) * static_cast<double>(k), hm, z[k],
                   "z layer " + std::to_string(k));
    doc.save(out + "/latents.svg");
  }

  write_resolved(out, resolved);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"leader-follower trajectory workbench"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  std::uint64_t seed = fallback_seed();
  int jobs = fallback_jobs();

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "simulate a dataset");
  EnvFlags ef;
  ef.add_to(gen);
  std::size_t count = 1000;
  auto* g_config = gen->add_option("--config", config_path, "INI config file");
  auto* g_count = gen->add_option("--n,--count", count, "episode count");
  auto* g_seed = gen->add_option("--seed", seed, "master seed");
  auto* g_jobs = gen->add_option("--jobs", jobs, "parallel workers");
  gen->add_option("--out", out_dir, "output directory");

  // train
  auto* train = app.add_subcommand("train", "train a model on a dataset");
  std::string data_path, mode_str = "mg-plt";
  TrainConfig tc;
  bool paper_hparams = false;
  auto* t_config = train->add_option("--config", config_path);
  train->add_option("--data", data_path, "dataset.jsonl path")->required();
  auto* t_mode = train->add_option(
      "--mode", mode_str, "sg|mg|mg-plt|edge-type|edge-type-skip1|sigmoid");
  auto* t_k = train->add_option("--k", tc.k_layers, "latent layers");
  auto* t_hidden = train->add_option("--hidden", tc.hidden);
  auto* t_lr = train->add_option("--lr", tc.lr_init);
  auto* t_batch = train->add_option("--batch", tc.batch_size);
  auto* t_epochs = train->add_option("--epochs", tc.max_epochs, "max epochs per stage");
  auto* t_fade = train->add_option("--fade-in-steps", tc.fade_in_steps);
  auto* t_patience = train->add_option("--patience", tc.stop_patience);
  auto* t_dropout = train->add_option(
      "--dropout", tc.dropout, "hidden-activation dropout rate during training");
  train->add_flag("--paper-hparams", paper_hparams,
                  "published hyperparameters (lr 1e-6, patience 100)");
  auto* t_seed = train->add_option("--seed", seed);
  train->add_option("--out", out_dir, "checkpoint directory");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  std::string ckpt, layer = "all";
  bool sweep = false;
  std::size_t sweep_episodes = 100;
  auto* e_config = eval->add_option("--config", config_path);
  eval->add_option("--ckpt", ckpt, "checkpoint path")->required();
  eval->add_option("--data", data_path, "dataset.jsonl path")->required();
  eval->add_flag("--sweep", sweep, "add the zero-shot generalization scenarios");
  auto* e_sweep_eps = eval->add_option("--sweep-episodes", sweep_episodes);
  auto* e_layer = eval->add_option("--layer", layer, "'all' or a layer index");
  auto* e_seed = eval->add_option("--seed", seed);
  auto* e_jobs = eval->add_option("--jobs", jobs);
  eval->add_option("--out", out_dir, "report directory");

  // counterfactual
  auto* cf = app.add_subcommand("counterfactual", "edit the latent graph and re-roll");
  std::size_t episode = 0;
  std::string split = "test";
  std::vector<std::string> edit_specs;
  cf->add_option("--ckpt", ckpt, "checkpoint path")->required();
  cf->add_option("--data", data_path, "dataset.jsonl path")->required();
  cf->add_option("--episode", episode, "episode index within the split");
  cf->add_option("--split", split, "train|val|test");
  cf->add_option("--edit", edit_specs, "edit spec k:i->j (repeatable)");
  cf->add_option("--out", out_dir, "output directory");

  // plot
  auto* plot = app.add_subcommand("plot", "render figures from logged outputs");
  std::vector<std::string> loss_logs, points;
  plot->add_option("--loss", loss_logs, "train_log.csv (repeatable)");
  plot->add_option("--point", points,
                   "sample-efficiency point label:size:report.json (repeatable)");
  plot->add_option("--ckpt", ckpt, "checkpoint for latent heatmaps");
  plot->add_option("--data", data_path, "dataset for latent heatmaps");
  plot->add_option("--episode", episode, "test episode index for heatmaps");
  plot->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
    if (gen->parsed())
      return cmd_gen_data(config_path, ef, count, g_count, seed, g_seed, jobs,
                          g_jobs, out_dir);
    if (train->parsed()) {
      (void)t_config;
      return cmd_train(config_path, data_path, mode_str, t_mode, tc, t_k,
                       t_hidden, t_lr, t_batch, t_epochs, t_fade, t_patience,
                       t_dropout, paper_hparams, seed, t_seed, out_dir);
    }
    if (eval->parsed()) {
      (void)e_config;
      return cmd_eval(config_path, ckpt, data_path, sweep, sweep_episodes,
                      e_sweep_eps, layer, e_layer, seed, e_seed, jobs, e_jobs,
                      out_dir);
    }
    if (cf->parsed())
      return cmd_counterfactual(ckpt, data_path, episode, split, edit_specs,
                                out_dir);
    if (plot->parsed())
      return cmd_plot(loss_logs, points, ckpt, data_path, episode, out_dir);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ShapeError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const VersionError& e) {
    std::cerr << "version mismatch: " << e.what() << "\n";
    return 5;
  } catch (const NumericError& e) {
    std::cerr << "numeric abort: " << e.what() << "\n";
    return 4;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const json::exception& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  }
}
