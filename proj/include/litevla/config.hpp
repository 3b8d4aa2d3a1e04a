// SPDX-License-Identifier: Apache-2.0
//
// Run configuration: built-in defaults, overlaid by an optional JSON config
// file, overlaid by CLI flags (handled by the tool). Every report embeds the
// fully resolved configuration and the seed.

#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "litevla/action_space.hpp"
#include "litevla/policy.hpp"
#include "litevla/sim.hpp"

namespace litevla {

struct RunConfig {
    ActionVocabulary vocab;   // 32/32 bins over [-0.5,0.5] m/s, [-1.5,1.5] rad/s
    PolicyDims dims;
    TrainConfig train;
    EpisodeConfig episode;
    std::uint64_t bench_runs = 300;
    std::uint64_t bench_warmup = 10;
    std::uint32_t dataset_episodes = 60;
    std::uint32_t eval_episodes = 100;
    std::uint64_t seed = 0;
};

inline void apply_json_overrides(RunConfig& cfg, const nlohmann::json& j) {
    if (j.contains("vocab")) {
        const auto& v = j.at("vocab");
        cfg.vocab = ActionVocabulary(
            v.value("v_bins", cfg.vocab.v_bin_count), v.value("w_bins", cfg.vocab.w_bin_count),
            v.value("v_min", cfg.vocab.v_min), v.value("v_max", cfg.vocab.v_max),
            v.value("w_min", cfg.vocab.w_min), v.value("w_max", cfg.vocab.w_max));
    }
    if (j.contains("model")) {
        const auto& m = j.at("model");
        cfg.dims.image_h = m.value("image_h", cfg.dims.image_h);
        cfg.dims.image_w = m.value("image_w", cfg.dims.image_w);
        cfg.dims.d_g = m.value("d_g", cfg.dims.d_g);
        cfg.dims.d_tok = m.value("d_tok", cfg.dims.d_tok);
        cfg.dims.d_h = m.value("d_h", cfg.dims.d_h);
        cfg.dims.num_goals = m.value("num_goals", cfg.dims.num_goals);
    }
    if (j.contains("train")) {
        const auto& t = j.at("train");
        cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
        cfg.train.epochs = t.value("epochs", cfg.train.epochs);
        cfg.train.batch_size = t.value("batch_size", cfg.train.batch_size);
    }
    if (j.contains("episode")) {
        const auto& e = j.at("episode");
        cfg.episode.controller_dt = e.value("controller_dt", cfg.episode.controller_dt);
        cfg.episode.reasoning_period = e.value("reasoning_period", cfg.episode.reasoning_period);
        cfg.episode.max_duration = e.value("max_duration", cfg.episode.max_duration);
        cfg.episode.success_radius = e.value("success_radius", cfg.episode.success_radius);
        cfg.episode.staleness_limit = e.value("staleness_limit", cfg.episode.staleness_limit);
        if (e.contains("goal_shift_time"))
            cfg.episode.goal_shift_time = e.at("goal_shift_time").get<double>();
    }
    if (j.contains("bench")) {
        const auto& b = j.at("bench");
        cfg.bench_runs = b.value("runs", cfg.bench_runs);
        cfg.bench_warmup = b.value("warmup", cfg.bench_warmup);
    }
    cfg.dataset_episodes = j.value("dataset_episodes", cfg.dataset_episodes);
    cfg.eval_episodes = j.value("eval_episodes", cfg.eval_episodes);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.train.seed = cfg.seed;
    cfg.episode.seed = cfg.seed;
}

inline RunConfig load_config(const std::string& path) {
    RunConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    nlohmann::json j;
    in >> j;
    apply_json_overrides(cfg, j);
    return cfg;
}

inline nlohmann::json config_to_json(const RunConfig& cfg) {
    return nlohmann::json{
        {"vocab",
         {{"v_bins", cfg.vocab.v_bin_count},
          {"w_bins", cfg.vocab.w_bin_count},
          {"v_min", cfg.vocab.v_min},
          {"v_max", cfg.vocab.v_max},
          {"w_min", cfg.vocab.w_min},
          {"w_max", cfg.vocab.w_max}}},
        {"model",
         {{"image_h", cfg.dims.image_h},
          {"image_w", cfg.dims.image_w},
          {"d_g", cfg.dims.d_g},
          {"d_tok", cfg.dims.d_tok},
          {"d_h", cfg.dims.d_h},
          {"num_goals", cfg.dims.num_goals}}},
        {"train",
         {{"learning_rate", cfg.train.learning_rate},
          {"epochs", cfg.train.epochs},
          {"batch_size", cfg.train.batch_size}}},
        {"episode",
         {{"controller_dt", cfg.episode.controller_dt},
          {"reasoning_period", cfg.episode.reasoning_period},
          {"max_duration", cfg.episode.max_duration},
          {"success_radius", cfg.episode.success_radius},
          {"staleness_limit", cfg.episode.staleness_limit},
          {"goal_shift_time", cfg.episode.goal_shift_time
                                  ? nlohmann::json(*cfg.episode.goal_shift_time)
                                  : nlohmann::json(nullptr)}}},
        {"bench", {{"runs", cfg.bench_runs}, {"warmup", cfg.bench_warmup}}},
        {"dataset_episodes", cfg.dataset_episodes},
        {"eval_episodes", cfg.eval_episodes},
        {"seed", cfg.seed}};
}

}  // namespace litevla
