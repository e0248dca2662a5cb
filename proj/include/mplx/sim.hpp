#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mplx/common.hpp"
#include "mplx/rng.hpp"

namespace mplx {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double det(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm_sq(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::sqrt(norm_sq(a)); }
inline Vec2 normalized(Vec2 a) {
  double n = norm(a);
  return n > 0.0 ? a * (1.0 / n) : Vec2{};
}

struct EnvConfig {
  int n_agents = 5;
  double agent_radius = 0.3;
  double arena_radius = 8.0;
  double safety_space = 0.09;
  double orca_time_horizon = 1.0;
  double preferred_speed = 1.0;
  double dt = 0.25;
  int t_obs = 24;
  int t_pred = 10;
  double speed_multiplier = 1.0;
  double arena_scale = 1.0;

  double max_speed() const { return preferred_speed * speed_multiplier; }
  int total_steps() const { return t_obs + t_pred; }

  void validate() const {
    if (n_agents < 2) throw ConfigError("n_agents must be >= 2");
    if (agent_radius <= 0 || arena_radius <= 0 || safety_space < 0 ||
        orca_time_horizon <= 0 || preferred_speed <= 0 || dt <= 0 ||
        speed_multiplier <= 0 || arena_scale <= 0)
      throw ConfigError("environment lengths/speeds must be positive");
    if (t_obs < 1 || t_pred < 1) throw ConfigError("horizons must be >= 1");
    if (arena_radius * arena_scale <=
        4.0 * agent_radius * std::sqrt(static_cast<double>(n_agents)))
      throw ConfigError("arena too small to spawn agents (spawnability)");
  }
};

struct LeaderGraph {
  std::vector<int> leader;  // leader[i] != i
};

struct AgentState {
  Vec2 pos;
  Vec2 vel;
};

struct Episode {
  EnvConfig config;
  LeaderGraph leaders;
  std::vector<std::vector<Vec2>> positions;  // [agent][time], time = t_obs + t_pred
  std::uint64_t seed = 0;
  std::string split = "train";
};

/// Each agent follows another, uniformly chosen; self-following forbidden,
/// cycles and mutual pairs allowed.
inline LeaderGraph sample_leader_graph(Rng& rng, int n) {
  if (n < 2) throw ConfigError("sample_leader_graph: need at least 2 agents");
  LeaderGraph g;
  g.leader.resize(n);
  for (int i = 0; i < n; ++i) {
    int pick = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n - 1)));
    g.leader[i] = pick < i ? pick : pick + 1;
  }
  return g;
}

/// Spawns agents on the arena circle at evenly spaced angles with bounded
/// angular jitter; rejects and resamples on overlap.
inline std::vector<Vec2> init_positions(Rng& rng, const EnvConfig& cfg,
                                        double jitter_scale = 1.0) {
  cfg.validate();
  const int n = cfg.n_agents;
  const double r = cfg.arena_radius * cfg.arena_scale;
  const double jitter_max = kPi / (4.0 * n) * jitter_scale;
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<Vec2> pos(n);
    for (int i = 0; i < n; ++i) {
      double theta = 2.0 * kPi * i / n + rng.uniform(-jitter_max, jitter_max);
      pos[i] = {r * std::cos(theta), r * std::sin(theta)};
    }
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      for (int j = i + 1; j < n; ++j)
        if (norm(pos[i] - pos[j]) < 2.0 * cfg.agent_radius) {
          ok = false;
          break;
        }
    if (ok) return pos;
  }
  throw ConfigError("init_positions: could not place agents without overlap");
}

/// Goal-seeking velocity toward the leader's current position, capped so one
/// step does not overshoot.
inline Vec2 preferred_velocity(const AgentState& agent, Vec2 leader_pos,
                               const EnvConfig& cfg) {
  Vec2 delta = leader_pos - agent.pos;
  double dist = norm(delta);
  if (dist < 1e-9) return {};
  double speed = std::min(cfg.max_speed(), dist / cfg.dt);
  return delta * (speed / dist);
}

/// ORCA half-plane: feasible velocities lie on the left of `direction`
/// through `point` (det(direction, point - v) <= 0).
struct HalfPlane {
  Vec2 point;
  Vec2 direction;
};

/// One constraint per neighbor, the standard truncated-cone construction with
/// reciprocity (each agent takes half of the minimal correction u).
inline std::vector<HalfPlane> orca_halfplanes(int i,
                                              const std::vector<AgentState>& states,
                                              const EnvConfig& cfg) {
  std::vector<HalfPlane> lines;
  const double inv_tau = 1.0 / cfg.orca_time_horizon;
  const double combined_r = 2.0 * cfg.agent_radius + cfg.safety_space;
  const double combined_r_sq = combined_r * combined_r;
  const AgentState& self = states[static_cast<std::size_t>(i)];
  for (std::size_t j = 0; j < states.size(); ++j) {
    if (static_cast<int>(j) == i) continue;
    const AgentState& other = states[j];
    const Vec2 rel_pos = other.pos - self.pos;
    const Vec2 rel_vel = self.vel - other.vel;
    const double dist_sq = norm_sq(rel_pos);

    Vec2 u, dir;
    if (dist_sq > combined_r_sq) {
      // no current collision: velocity obstacle truncated at tau
      const Vec2 w = rel_vel - rel_pos * inv_tau;
      const double w_len_sq = norm_sq(w);
      const double dot1 = dot(w, rel_pos);
      if (dot1 < 0.0 && dot1 * dot1 > combined_r_sq * w_len_sq) {
        // project on the cut-off circle
        const double w_len = std::sqrt(w_len_sq);
        const Vec2 unit_w = w * (1.0 / w_len);
        dir = {unit_w.y, -unit_w.x};
        u = unit_w * (combined_r * inv_tau - w_len);
      } else {
        // project on a leg of the cone
        const double leg = std::sqrt(dist_sq - combined_r_sq);
        if (det(rel_pos, w) > 0.0) {
          dir = Vec2{rel_pos.x * leg - rel_pos.y * combined_r,
                     rel_pos.x * combined_r + rel_pos.y * leg} *
                (1.0 / dist_sq);
        } else {
          dir = Vec2{rel_pos.x * leg + rel_pos.y * combined_r,
                     -rel_pos.x * combined_r + rel_pos.y * leg} *
                (-1.0 / dist_sq);
        }
        u = dir * dot(rel_vel, dir) - rel_vel;
      }
    } else {
      // already interpenetrating: resolve within one time step
      const double inv_dt = 1.0 / cfg.dt;
      const Vec2 w = rel_vel - rel_pos * inv_dt;
      const double w_len = norm(w);
      const Vec2 unit_w = w_len > 0.0 ? w * (1.0 / w_len) : Vec2{1.0, 0.0};
      dir = {unit_w.y, -unit_w.x};
      u = unit_w * (combined_r * inv_dt - w_len);
    }
    lines.push_back({self.vel + u * 0.5, dir});
  }
  return lines;
}

namespace detail {

constexpr double kLpEps = 1e-10;

inline bool linear_program1(const std::vector<HalfPlane>& lines, std::size_t line_no,
                            double radius, Vec2 opt, bool direction_opt, Vec2& result) {
  const double dot_product = dot(lines[line_no].point, lines[line_no].direction);
  const double discriminant =
      dot_product * dot_product + radius * radius - norm_sq(lines[line_no].point);
  if (discriminant < 0.0) return false;  // speed disc misses the line entirely
  const double sqrt_d = std::sqrt(discriminant);
  double t_left = -dot_product - sqrt_d;
  double t_right = -dot_product + sqrt_d;
  for (std::size_t i = 0; i < line_no; ++i) {
    const double denom = det(lines[line_no].direction, lines[i].direction);
    const double numer =
        det(lines[i].direction, lines[line_no].point - lines[i].point);
    if (std::abs(denom) <= kLpEps) {
      if (numer < 0.0) return false;  // parallel and fully infeasible
      continue;
    }
    const double t = numer / denom;
    if (denom >= 0.0)
      t_right = std::min(t_right, t);
    else
      t_left = std::max(t_left, t);
    if (t_left > t_right) return false;
  }
  if (direction_opt) {
    if (dot(opt, lines[line_no].direction) > 0.0)
      result = lines[line_no].point + lines[line_no].direction * t_right;
    else
      result = lines[line_no].point + lines[line_no].direction * t_left;
  } else {
    const double t = dot(lines[line_no].direction, opt - lines[line_no].point);
    result = lines[line_no].point +
             lines[line_no].direction * std::clamp(t, t_left, t_right);
  }
  return true;
}

inline std::size_t linear_program2(const std::vector<HalfPlane>& lines, double radius,
                                   Vec2 opt, bool direction_opt, Vec2& result) {
  if (direction_opt) {
    result = opt * radius;  // opt is a unit direction here
  } else if (norm_sq(opt) > radius * radius) {
    result = normalized(opt) * radius;
  } else {
    result = opt;
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (det(lines[i].direction, lines[i].point - result) > 0.0) {
      const Vec2 temp = result;
      if (!linear_program1(lines, i, radius, opt, direction_opt, result)) {
        result = temp;
        return i;
      }
    }
  }
  return lines.size();
}

/// Infeasible fallback: minimize the maximum constraint violation.
inline void linear_program3(const std::vector<HalfPlane>& lines, std::size_t begin_line,
                            double radius, Vec2& result) {
  double distance = 0.0;
  for (std::size_t i = begin_line; i < lines.size(); ++i) {
    if (det(lines[i].direction, lines[i].point - result) > distance) {
      std::vector<HalfPlane> proj;
      for (std::size_t j = 0; j < i; ++j) {
        HalfPlane line;
        const double denom = det(lines[i].direction, lines[j].direction);
        if (std::abs(denom) <= kLpEps) {
          if (dot(lines[i].direction, lines[j].direction) > 0.0) continue;
          line.point = (lines[i].point + lines[j].point) * 0.5;
        } else {
          line.point = lines[i].point +
                       lines[i].direction *
                           (det(lines[j].direction, lines[i].point - lines[j].point) /
                            denom);
        }
        line.direction = normalized(lines[j].direction - lines[i].direction);
        proj.push_back(line);
      }
      const Vec2 temp = result;
      if (linear_program2(proj, radius,
                          Vec2{-lines[i].direction.y, lines[i].direction.x}, true,
                          result) < proj.size()) {
        result = temp;
      }
      distance = det(lines[i].direction, lines[i].point - result);
    }
  }
}

}  // namespace detail

/// Closest point to pref_vel inside the intersection of half-planes and the
/// speed disc; falls back to minimal-violation when infeasible. Constraints
/// are processed in their given (fixed) order.
inline Vec2 solve_velocity_lp(const std::vector<HalfPlane>& constraints,
                              Vec2 pref_vel, double max_speed) {
  if (max_speed <= 0.0) throw ConfigError("solve_velocity_lp: max_speed must be > 0");
  Vec2 result;
  std::size_t fail =
      detail::linear_program2(constraints, max_speed, pref_vel, false, result);
  if (fail < constraints.size())
    detail::linear_program3(constraints, fail, max_speed, result);
  // numeric safety only; the LP keeps results inside the disc
  double n2 = norm_sq(result);
  if (n2 > max_speed * max_speed)
    result = result * (max_speed / std::sqrt(n2));
  return result;
}

/// Advances all agents `steps` times (Jacobi update: everyone plans against
/// start-of-step states), appending positions to `positions[agent]`.
inline void simulate_steps(std::vector<AgentState>& states, const LeaderGraph& leaders,
                           const EnvConfig& cfg, int steps,
                           std::vector<std::vector<Vec2>>& positions,
                           bool zero_preferred = false) {
  const int n = cfg.n_agents;
  std::vector<Vec2> new_vel(n);
  for (int t = 0; t < steps; ++t) {
    for (int i = 0; i < n; ++i) {
      Vec2 pref = zero_preferred
                      ? Vec2{}
                      : preferred_velocity(states[i], states[leaders.leader[i]].pos, cfg);
      auto lines = orca_halfplanes(i, states, cfg);
      new_vel[i] = solve_velocity_lp(lines, pref, cfg.max_speed());
    }
    for (int i = 0; i < n; ++i) {
      states[i].vel = new_vel[i];
      states[i].pos += new_vel[i] * cfg.dt;
      positions[i].push_back(states[i].pos);
    }
  }
}

/// (config, seed) -> Episode is a pure, bitwise-reproducible function.
inline Episode simulate_episode(const EnvConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed, "episode");
  Episode ep;
  ep.config = cfg;
  ep.seed = seed;
  ep.leaders = sample_leader_graph(rng, cfg.n_agents);
  auto spawn = init_positions(rng, cfg);
  std::vector<AgentState> states(cfg.n_agents);
  ep.positions.assign(cfg.n_agents, {});
  for (int i = 0; i < cfg.n_agents; ++i) {
    states[i].pos = spawn[i];
    ep.positions[i].push_back(spawn[i]);
  }
  simulate_steps(states, ep.leaders, cfg, cfg.total_steps() - 1, ep.positions);
  return ep;
}

}  // namespace mplx
