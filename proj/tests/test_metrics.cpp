#include <cmath>

#include "doctest.h"
#include "mplx/metrics.hpp"
#include "mplx/trainer.hpp"

using namespace mplx;

namespace {

EnvConfig small_env() {
  EnvConfig c;
  c.n_agents = 4;
  c.t_obs = 6;
  c.t_pred = 3;
  return c;
}

Dataset sim_dataset(const EnvConfig& env, std::size_t count, std::uint64_t seed) {
  Dataset ds;
  ds.env = env;
  ds.master_seed = seed;
  for (std::size_t i = 0; i < count; ++i) {
    Episode ep = simulate_episode(env, derive_seed(seed, i));
    ep.split = split_for_index(i, count);
    ds.episodes.push_back(std::move(ep));
  }
  return ds;
}

Model small_model(const EnvConfig& env, TrainMode mode, std::uint64_t seed) {
  TrainConfig tc;
  tc.mode = mode;
  tc.k_layers = mode == TrainMode::sg ? 1 : 2;
  tc.hidden = 8;
  return Model::init(tc.model_config(env), seed, tc.k_layers);
}

Tensor random_square(Rng& rng, std::size_t n) {
  Tensor z = Tensor::zeros({n, n});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) z.at(i, j) = rng.uniform(0.0, 1.0);
  return z;
}

}  // namespace

TEST_CASE("ade and fde arithmetic") {
  Tracks truth{{{0, 0}, {1, 0}}, {{2, 2}, {3, 3}}};
  SUBCASE("exact predictions score zero") {
    CHECK(ade(truth, truth) == 0.0);
    CHECK(fde(truth, truth) == 0.0);
  }
  SUBCASE("constant (3,4) offset scores 5 on both") {
    Tracks pred = truth;
    for (auto& track : pred)
      for (auto& p : track) p += {3, 4};
    CHECK(ade(pred, truth) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(fde(pred, truth) == doctest::Approx(5.0).epsilon(1e-12));
  }
  SUBCASE("single agent, offsets (1,0) then (0,2): ade 1.5, fde 2") {
    Tracks t{{{0, 0}, {0, 0}}};
    Tracks p{{{1, 0}, {0, 2}}};
    CHECK(ade(p, t) == doctest::Approx(1.5));
    CHECK(fde(p, t) == doctest::Approx(2.0));
  }
  SUBCASE("last-step-only error: fde 2, ade error/T_f") {
    Tracks t(1, Track(10, {0, 0}));
    Tracks p = t;
    p[0].back() = {0, 2};
    CHECK(fde(p, t) == doctest::Approx(2.0));
    CHECK(ade(p, t) == doctest::Approx(0.2));
  }
  SUBCASE("translation invariance") {
    Rng rng(3);
    Tracks t(2, Track(4)), p(2, Track(4));
    for (auto tracks : {&t, &p})
      for (auto& track : *tracks)
        for (auto& pt : track) pt = {rng.normal(), rng.normal()};
    double a0 = ade(p, t), f0 = fde(p, t);
    for (auto tracks : {&t, &p})
      for (auto& track : *tracks)
        for (auto& pt : track) pt += {17.0, -4.0};
    CHECK(std::abs(ade(p, t) - a0) < 1e-12);
    CHECK(std::abs(fde(p, t) - f0) < 1e-12);
  }
  SUBCASE("shape mismatch rejected") {
    Tracks short_pred{{{0, 0}}};
    CHECK_THROWS_AS(ade(short_pred, truth), ShapeError);
    CHECK_THROWS_AS(fde(Tracks{{{0, 0}}}, Tracks{{{0, 0}, {1, 1}}}), ShapeError);
  }
}

TEST_CASE("graph accuracy") {
  SUBCASE("one-hot rows matching ground truth score 1") {
    Tensor z = Tensor::zeros({3, 3});
    LeaderGraph gt{{1, 2, 0}};
    z.at(0, 1) = z.at(1, 2) = z.at(2, 0) = 1.0;
    CHECK(graph_accuracy(z, gt) == 1.0);
  }
  SUBCASE("uniform rows: tie-break to the lowest-indexed neighbor") {
    std::size_t n = 5;
    Tensor z = Tensor::full({n, n}, 0.2);
    for (std::size_t i = 0; i < n; ++i) z.at(i, i) = 0.0;
    // argmax resolves to agent 0, except row 0 which resolves to agent 1
    CHECK(graph_accuracy(z, LeaderGraph{{1, 0, 0, 0, 0}}) == 1.0);
    CHECK(graph_accuracy(z, LeaderGraph{{2, 0, 0, 0, 0}}) ==
          doctest::Approx(0.8));
  }
  SUBCASE("random rows converge to the 1/(N-1) chance level") {
    Rng rng(7);
    const std::size_t n = 5;
    const int samples = 20000;
    double acc = 0.0;
    for (int s = 0; s < samples; ++s) {
      Tensor z = random_square(rng, n);
      LeaderGraph gt;
      for (std::size_t i = 0; i < n; ++i) {
        int pick = static_cast<int>(rng.uniform_index(n - 1));
        gt.leader.push_back(pick < static_cast<int>(i) ? pick : pick + 1);
      }
      acc += graph_accuracy(z, gt);
    }
    CHECK(std::abs(acc / samples - 0.25) < 0.01);
  }
  SUBCASE("invariant to strictly monotone per-row rescaling") {
    Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
      Tensor z = random_square(rng, 4);
      Tensor scaled = z;
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
          scaled.at(i, j) = (2.0 + static_cast<double>(i)) * z.at(i, j) + 0.1;
      for (std::size_t i = 0; i < 4; ++i) scaled.at(i, i) = 0.0;
      LeaderGraph gt{{1, 2, 3, 0}};
      CHECK(graph_accuracy(z, gt) == graph_accuracy(scaled, gt));
    }
  }
}

TEST_CASE("nmi score") {
  Rng rng(11);
  SUBCASE("identical layers score exactly 1") {
    for (int trial = 0; trial < 20; ++trial) {
      Tensor z = random_square(rng, 5);
      CHECK(nmi_score(z, z) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("complement layers score 1 (complete dependency)") {
    for (int trial = 0; trial < 20; ++trial) {
      Tensor z = random_square(rng, 5);
      Tensor comp = Tensor::zeros({5, 5});
      for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j)
          if (i != j) comp.at(i, j) = 1.0 - z.at(i, j);
      CHECK(std::abs(nmi_score(z, comp) - 1.0) < 1e-6);
    }
  }
  SUBCASE("independent random layers score low, shrinking with N") {
    // plugin MI keeps a small-sample bias (~0.22 at N=10 over the pooled
    // N*(N-1) rank labels); it decays toward 0 as the pool grows
    auto mean_nmi = [&](std::size_t n, int samples) {
      double acc = 0.0;
      for (int s = 0; s < samples; ++s)
        acc += nmi_score(random_square(rng, n), random_square(rng, n));
      return acc / samples;
    };
    double at10 = mean_nmi(10, 200);
    double at20 = mean_nmi(20, 100);
    CHECK(at10 < 0.3);
    CHECK(at20 < 0.2);
    CHECK(at20 < at10);
  }
  SUBCASE("symmetry") {
    for (int trial = 0; trial < 20; ++trial) {
      Tensor a = random_square(rng, 6);
      Tensor b = random_square(rng, 6);
      CHECK(std::abs(nmi_score(a, b) - nmi_score(b, a)) < 1e-12);
    }
  }
  SUBCASE("shape mismatch rejected") {
    CHECK_THROWS_AS(nmi_score(Tensor::zeros({3, 3}), Tensor::zeros({4, 4})),
                    ShapeError);
  }
}

TEST_CASE("whole-model evaluation report") {
  EnvConfig env = small_env();
  Dataset ds = sim_dataset(env, 10, 13);
  Model m = small_model(env, TrainMode::mg, 13);
  std::vector<const Episode*> eps;
  for (const auto& ep : ds.episodes) eps.push_back(&ep);

  EvalReport rep = evaluate(m, eps);
  CHECK(rep.per_episode.size() == 10);
  CHECK(rep.graph_accuracy.size() == 2);
  CHECK(rep.chance_accuracy == doctest::Approx(1.0 / 3));
  CHECK(rep.headline_layer == 0);
  CHECK(rep.ade >= 0.0);
  CHECK(rep.stand_still_ade > 0.0);
  CHECK(rep.nmi >= 0.0);
  CHECK(rep.nmi <= 1.0);
  json j = rep.to_json();
  CHECK(j.at("episodes") == 10);

  SUBCASE("parallel evaluation reduces to identical results") {
    EvalReport par = evaluate(m, eps, 4);
    CHECK(par.ade == rep.ade);
    CHECK(par.fde == rep.fde);
    CHECK(par.nmi == rep.nmi);
    CHECK(par.graph_accuracy == rep.graph_accuracy);
    for (std::size_t i = 0; i < par.per_episode.size(); ++i)
      CHECK(par.per_episode[i].episode_seed == rep.per_episode[i].episode_seed);
  }
  SUBCASE("empty episode list rejected") {
    CHECK_THROWS_AS(evaluate(m, {}), ConfigError);
  }
}

TEST_CASE("graph edits preserve mode invariants and locality") {
  Rng rng(17);
  std::size_t n = 4;
  SUBCASE("multiplex one-hot replacement, other rows untouched") {
    std::vector<Tensor> z{random_square(rng, n), random_square(rng, n)};
    Tensor before = z[0];
    auto out = apply_graph_edits(z, GraphMode::multiplex, {{0, 1, 3}});
    CHECK(out[0].at(1, 3) == 1.0);
    for (std::size_t j = 0; j < n; ++j)
      if (j != 3) CHECK(out[0].at(1, j) == 0.0);
    for (std::size_t i = 0; i < n; ++i)
      if (i != 1)
        for (std::size_t j = 0; j < n; ++j)
          CHECK(out[0].at(i, j) == before.at(i, j));
    CHECK(out[1].data == z[1].data);  // other layer untouched in multiplex mode
  }
  SUBCASE("edge-type edits are layer-local too") {
    std::vector<Tensor> z{Tensor::zeros({n, n}), Tensor::zeros({n, n})};
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) {
          double v = rng.uniform(0.05, 0.95);
          z[0].at(i, j) = v;
          z[1].at(i, j) = 1.0 - v;
        }
    Tensor other = z[1];
    auto out = apply_graph_edits(z, GraphMode::edge_type, {{0, 2, 1}});
    CHECK(out[0].at(2, 1) == 1.0);
    for (std::size_t j = 0; j < n; ++j)
      if (j != 1) CHECK(out[0].at(2, j) == 0.0);
    CHECK(out[1].data == other.data);
  }
  SUBCASE("sigmoid edit stays strictly inside (0,1)") {
    std::vector<Tensor> z{random_square(rng, n)};
    auto out = apply_graph_edits(z, GraphMode::sigmoid, {{0, 0, 2}});
    for (std::size_t j = 0; j < n; ++j) {
      if (j == 0) continue;
      CHECK(out[0].at(0, j) > 0.0);
      CHECK(out[0].at(0, j) < 1.0);
    }
    CHECK(out[0].at(0, 2) > 0.99);
  }
  SUBCASE("invalid edits rejected") {
    std::vector<Tensor> z{random_square(rng, n)};
    CHECK_THROWS_AS(apply_graph_edits(z, GraphMode::multiplex, {{1, 0, 1}}),
                    ConfigError);  // layer out of range
    CHECK_THROWS_AS(apply_graph_edits(z, GraphMode::multiplex, {{0, 2, 2}}),
                    ConfigError);  // self edge
    CHECK_THROWS_AS(apply_graph_edits(z, GraphMode::multiplex, {{0, 0, 9}}),
                    ConfigError);  // column out of range
  }
}

TEST_CASE("counterfactual rollouts") {
  EnvConfig env = small_env();
  Dataset ds = sim_dataset(env, 3, 19);
  SUBCASE("empty edit list reproduces the original rollout") {
    Model m = small_model(env, TrainMode::mg, 19);
    CounterfactualResult cf = counterfactual_rollout(m, ds.episodes[0], {});
    REQUIRE(cf.original.size() == cf.edited.size());
    for (std::size_t i = 0; i < cf.original.size(); ++i)
      for (std::size_t t = 0; t < cf.original[i].size(); ++t) {
        CHECK(cf.edited[i][t].x == cf.original[i][t].x);
        CHECK(cf.edited[i][t].y == cf.original[i][t].y);
      }
  }
  SUBCASE("an edit changes the edited agent's trajectory") {
    Model m = small_model(env, TrainMode::mg, 19);
    CounterfactualResult cf =
        counterfactual_rollout(m, ds.episodes[0], {{0, 1, 3}});
    double moved = norm(cf.edited[1].back() - cf.original[1].back());
    CHECK(moved > 1e-9);
    CHECK(cf.z_after[0].at(1, 3) == 1.0);
    CHECK(cf.z_before[0].at(1, 3) != 1.0);
  }
  SUBCASE("skip1 model ignores layer-1 edits") {
    Model m = small_model(env, TrainMode::edge_type_skip1, 23);
    CounterfactualResult cf =
        counterfactual_rollout(m, ds.episodes[0], {{0, 1, 3}});
    for (std::size_t i = 0; i < cf.original.size(); ++i)
      for (std::size_t t = 0; t < cf.original[i].size(); ++t) {
        CHECK(cf.edited[i][t].x == cf.original[i][t].x);
        CHECK(cf.edited[i][t].y == cf.original[i][t].y);
      }
  }
}

TEST_CASE("generalization sweep") {
  EnvConfig env = small_env();
  SUBCASE("standard scenarios modify the right knobs") {
    auto scenarios = standard_scenarios(env);
    REQUIRE(scenarios.size() == 3);
    CHECK(scenarios[0].name == "2x_speed");
    CHECK(scenarios[0].env.speed_multiplier == 2.0);
    CHECK(scenarios[1].name == "2x_smaller");
    CHECK(scenarios[1].env.arena_scale == 0.5);
    CHECK(scenarios[2].name == "2x_agents");
    CHECK(scenarios[2].env.n_agents == 8);
  }
  SUBCASE("empty scenario list gives an empty report map") {
    Model m = small_model(env, TrainMode::mg, 29);
    CHECK(generalization_sweep(m, {}, 5, 1).empty());
  }
  SUBCASE("doubled agents run zero-shot with per-scenario chance level") {
    Model m = small_model(env, TrainMode::mg, 31);
    auto reports = generalization_sweep(m, standard_scenarios(env), 4, 2);
    REQUIRE(reports.size() == 3);
    CHECK(reports.at("2x_agents").chance_accuracy == doctest::Approx(1.0 / 7));
    for (const auto& [name, rep] : reports) {
      CHECK(std::isfinite(rep.ade));
      CHECK(std::isfinite(rep.fde));
      CHECK(rep.per_episode.size() == 4);
    }
  }
  SUBCASE("sweep is deterministic across jobs") {
    Model m = small_model(env, TrainMode::mg, 31);
    auto a = generalization_sweep(m, standard_scenarios(env), 4, 2, 1);
    auto b = generalization_sweep(m, standard_scenarios(env), 4, 2, 3);
    CHECK(a.at("2x_speed").ade == b.at("2x_speed").ade);
    CHECK(a.at("2x_agents").graph_accuracy == b.at("2x_agents").graph_accuracy);
  }
}
