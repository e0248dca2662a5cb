#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mplx/common.hpp"
#include "mplx/rng.hpp"
#include "mplx/sim.hpp"

namespace mplx {

using json = nlohmann::json;

/// %.17g rendering so the text round-trips the exact double.
inline std::string f64_str(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline json env_to_json(const EnvConfig& c) {
  return json{{"n_agents", c.n_agents},
              {"agent_radius", c.agent_radius},
              {"arena_radius", c.arena_radius},
              {"safety_space", c.safety_space},
              {"orca_time_horizon", c.orca_time_horizon},
              {"preferred_speed", c.preferred_speed},
              {"dt", c.dt},
              {"t_obs", c.t_obs},
              {"t_pred", c.t_pred},
              {"speed_multiplier", c.speed_multiplier},
              {"arena_scale", c.arena_scale}};
}

inline EnvConfig env_from_json(const json& j) {
  EnvConfig c;
  c.n_agents = j.at("n_agents").get<int>();
  c.agent_radius = j.at("agent_radius").get<double>();
  c.arena_radius = j.at("arena_radius").get<double>();
  c.safety_space = j.at("safety_space").get<double>();
  c.orca_time_horizon = j.at("orca_time_horizon").get<double>();
  c.preferred_speed = j.at("preferred_speed").get<double>();
  c.dt = j.at("dt").get<double>();
  c.t_obs = j.at("t_obs").get<int>();
  c.t_pred = j.at("t_pred").get<int>();
  c.speed_multiplier = j.at("speed_multiplier").get<double>();
  c.arena_scale = j.at("arena_scale").get<double>();
  return c;
}

struct Dataset {
  EnvConfig env;
  std::uint64_t master_seed = 0;
  std::vector<Episode> episodes;

  std::vector<std::size_t> split_indices(const std::string& split) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < episodes.size(); ++i)
      if (episodes[i].split == split) out.push_back(i);
    return out;
  }
};

/// 80/10/10 split by episode counter.
inline std::string split_for_index(std::size_t i, std::size_t count) {
  std::size_t n_train = count * 8 / 10;
  std::size_t n_trainval = count * 9 / 10;
  if (i < n_train) return "train";
  if (i < n_trainval) return "val";
  return "test";
}

inline std::string episode_to_jsonl(const Episode& ep) {
  std::ostringstream os;
  os << "{\"seed\":" << ep.seed << ",\"split\":\"" << ep.split << "\",\"leader\":[";
  for (std::size_t i = 0; i < ep.leaders.leader.size(); ++i) {
    if (i) os << ",";
    os << ep.leaders.leader[i];
  }
  os << "],\"positions\":[";
  for (std::size_t i = 0; i < ep.positions.size(); ++i) {
    if (i) os << ",";
    os << "[";
    for (std::size_t t = 0; t < ep.positions[i].size(); ++t) {
      if (t) os << ",";
      os << "[" << f64_str(ep.positions[i][t].x) << ","
         << f64_str(ep.positions[i][t].y) << "]";
    }
    os << "]";
  }
  os << "]}";
  return os.str();
}

inline Episode episode_from_json(const json& j, const EnvConfig& env) {
  Episode ep;
  ep.config = env;
  ep.seed = j.at("seed").get<std::uint64_t>();
  ep.split = j.at("split").get<std::string>();
  ep.leaders.leader = j.at("leader").get<std::vector<int>>();
  for (const auto& agent : j.at("positions")) {
    std::vector<Vec2> track;
    for (const auto& p : agent)
      track.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    ep.positions.push_back(std::move(track));
  }
  return ep;
}

/// Simulates `count` episodes (seeds derived from the master seed by counter)
/// and writes them as JSON-lines with the 80/10/10 split embedded. With
/// jobs > 1 episodes are simulated in parallel but written in counter order,
/// so the file is byte-identical regardless of jobs.
inline Dataset generate_dataset(const EnvConfig& cfg, std::size_t count,
                                std::uint64_t master_seed, const std::string& path,
                                int jobs = 1) {
  cfg.validate();
  if (jobs < 1) throw ConfigError("generate_dataset: jobs must be >= 1");
  Dataset ds;
  ds.env = cfg;
  ds.master_seed = master_seed;
  ds.episodes.resize(count);
  parallel_for(count, jobs, [&](std::size_t i) {
    Episode ep = simulate_episode(cfg, derive_seed(master_seed, i));
    ep.split = split_for_index(i, count);
    ds.episodes[i] = std::move(ep);
  });
  std::ofstream f(path);
  if (!f) throw IoError("cannot open dataset file for write: " + path);
  json header{{"format_version", 1},
              {"env", env_to_json(cfg)},
              {"count", count},
              {"master_seed", master_seed}};
  f << header.dump() << "\n";
  for (const Episode& ep : ds.episodes) f << episode_to_jsonl(ep) << "\n";
  if (!f) throw IoError("write failed: " + path);
  return ds;
}

inline Dataset load_dataset(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open dataset file: " + path);
  std::string line;
  if (!std::getline(f, line)) throw IoError("empty dataset file: " + path);
  json header = json::parse(line);
  if (header.at("format_version").get<int>() != 1)
    throw VersionError("unsupported dataset format_version in " + path);
  Dataset ds;
  ds.env = env_from_json(header.at("env"));
  ds.master_seed = header.at("master_seed").get<std::uint64_t>();
  std::size_t count = header.at("count").get<std::size_t>();
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    ds.episodes.push_back(episode_from_json(json::parse(line), ds.env));
  }
  if (ds.episodes.size() != count)
    throw IoError("dataset episode count mismatch in " + path);
  return ds;
}

/// FNV-1a digest of a file's bytes, hex encoded (stable manifest fingerprint).
inline std::string file_digest(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for digest: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (f.read(buf, sizeof(buf)) || f.gcount() > 0) {
    for (std::streamsize i = 0; i < f.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!f) break;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return out;
}

}  // namespace mplx
