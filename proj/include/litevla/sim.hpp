// SPDX-License-Identifier: Apache-2.0
//
// Synthetic closed-loop world: egocentric observation rendering, a scripted
// expert, unicycle kinematics, pluggable reasoning backends, the
// simulated-clock episode runner and the wall-clock latency benchmark.

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "litevla/action_parser.hpp"
#include "litevla/action_space.hpp"
#include "litevla/bridge.hpp"
#include "litevla/policy.hpp"

namespace litevla {

// ── world ───────────────────────────────────────────────────────────────────

inline constexpr double kArenaHalfExtent = 2.0;  // arena is [-2, 2]^2
inline constexpr std::uint32_t kNumGoalColors = 3;

inline const char* goal_color_name(std::uint32_t color) {
    static constexpr const char* names[] = {"red", "green", "blue"};
    return names[color % kNumGoalColors];
}

inline double wrap_angle(double a) {
    a = std::fmod(a + std::numbers::pi, 2.0 * std::numbers::pi);
    if (a < 0) a += 2.0 * std::numbers::pi;
    a -= std::numbers::pi;  // now in [-pi, pi); map the closed edge to +pi
    return a == -std::numbers::pi ? std::numbers::pi : a;
}

struct Pose {
    double x = 0.0, y = 0.0, heading = 0.0;
};

struct WorldTarget {
    double x = 0.0, y = 0.0;
    std::uint32_t color = 0;  // channel index
};

struct WorldState {
    Pose robot;
    std::vector<WorldTarget> targets;
    std::size_t active_goal = 0;
    double time = 0.0;  // simulated seconds

    const WorldTarget& active() const { return targets.at(active_goal); }
};

namespace detail {

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

}  // namespace detail

/// Random solvable world: robot near the center, one target per world at a
/// moderate distance, random color.
inline WorldState make_world(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    WorldState w;
    w.robot.x = detail::uniform(rng, -1.0, 1.0);
    w.robot.y = detail::uniform(rng, -1.0, 1.0);
    w.robot.heading = detail::uniform(rng, -std::numbers::pi, std::numbers::pi);
    WorldTarget t;
    const double bearing = detail::uniform(rng, -std::numbers::pi, std::numbers::pi);
    const double dist = detail::uniform(rng, 0.6, 1.6);
    t.x = std::clamp(w.robot.x + dist * std::cos(bearing), -kArenaHalfExtent, kArenaHalfExtent);
    t.y = std::clamp(w.robot.y + dist * std::sin(bearing), -kArenaHalfExtent, kArenaHalfExtent);
    t.color = static_cast<std::uint32_t>(rng() % kNumGoalColors);
    w.targets.push_back(t);
    w.active_goal = 0;
    return w;
}

inline void teleport_active_target(WorldState& world, std::mt19937_64& rng) {
    const double bearing = detail::uniform(rng, -std::numbers::pi, std::numbers::pi);
    const double dist = detail::uniform(rng, 0.8, 1.6);
    WorldTarget& t = world.targets[world.active_goal];
    t.x = std::clamp(world.robot.x + dist * std::cos(bearing), -kArenaHalfExtent,
                     kArenaHalfExtent);
    t.y = std::clamp(world.robot.y + dist * std::sin(bearing), -kArenaHalfExtent,
                     kArenaHalfExtent);
}

// ── observation rendering ───────────────────────────────────────────────────

/// Deterministic egocentric render: every target ahead of the robot is drawn
/// as a 2x2 block in its color channel; the column encodes bearing, the row
/// encodes distance (near = bottom). Targets behind the robot are not drawn.
inline Observation render_observation(const WorldState& world, std::uint32_t height = 16,
                                      std::uint32_t width = 16) {
    Observation obs;
    obs.height = height;
    obs.width = width;
    obs.image.assign(static_cast<std::size_t>(height) * width * 3, 0.0);
    for (const auto& target : world.targets) {
        const double dx = target.x - world.robot.x;
        const double dy = target.y - world.robot.y;
        const double fwd = std::cos(world.robot.heading) * dx +
                           std::sin(world.robot.heading) * dy;
        if (fwd <= 0.0) continue;  // behind
        const double left = -std::sin(world.robot.heading) * dx +
                            std::cos(world.robot.heading) * dy;
        const double bearing = std::atan2(left, fwd);  // in (-pi/2, pi/2)
        const double dist = std::hypot(dx, dy);

        const double col_f = (0.5 - bearing / std::numbers::pi) * width;
        const double row_f = (1.0 - std::min(dist, 4.0) / 4.0) * height;
        const auto c0 = static_cast<std::uint32_t>(
            std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(col_f)) - 1, 0,
                                     width - 2));
        const auto r0 = static_cast<std::uint32_t>(
            std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(row_f)) - 1, 0,
                                     height - 2));
        for (std::uint32_t r = r0; r < r0 + 2; ++r)
            for (std::uint32_t c = c0; c < c0 + 2; ++c)
                obs.image[(static_cast<std::size_t>(r) * width + c) * 3 + target.color] = 1.0;
    }
    const std::uint32_t color = world.active().color;
    obs.goal.goal_id = color;
    obs.goal.text = std::string("reach the ") + goal_color_name(color) + " target";
    return obs;
}

// ── expert and dynamics ─────────────────────────────────────────────────────

inline ActionCommand expert_policy(const WorldState& world) {
    const auto& t = world.active();
    const double dx = t.x - world.robot.x;
    const double dy = t.y - world.robot.y;
    const double dist = std::hypot(dx, dy);
    const double heading_error = wrap_angle(std::atan2(dy, dx) - world.robot.heading);
    ActionCommand cmd;
    cmd.linear_velocity = std::clamp(0.5 * dist, 0.0, 0.5);
    cmd.angular_velocity = std::clamp(2.0 * heading_error, -1.5, 1.5);
    return cmd;
}

inline Pose step_unicycle(const Pose& pose, const ActionCommand& cmd, double dt) {
    Pose next;
    next.x = std::clamp(pose.x + cmd.linear_velocity * std::cos(pose.heading) * dt,
                        -kArenaHalfExtent, kArenaHalfExtent);
    next.y = std::clamp(pose.y + cmd.linear_velocity * std::sin(pose.heading) * dt,
                        -kArenaHalfExtent, kArenaHalfExtent);
    next.heading = wrap_angle(pose.heading + cmd.angular_velocity * dt);
    return next;
}

// ── reasoning backends ──────────────────────────────────────────────────────

struct BackendConfig {
    std::uint32_t n_ctx = 512;       // provenance metadata
    std::uint32_t max_tokens = 12;
    std::uint32_t layers = 42;       // provenance metadata
};

struct BackendError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class ReasoningBackend {
public:
    virtual ~ReasoningBackend() = default;
    virtual ActionTokenSeq infer(const Observation& obs) = 0;
    /// Called by the episode runner before each decision; oracle backends use
    /// it, learned backends ignore it.
    virtual void observe_world(const WorldState&) {}

    BackendConfig config;
};

/// Oracle backend: runs the scripted expert on ground-truth world state and
/// tokenizes its command through the action codec.
class ExpertBackend : public ReasoningBackend {
public:
    explicit ExpertBackend(ActionVocabulary vocab) : vocab_(vocab) {}

    void observe_world(const WorldState& world) override { world_ = world; }

    ActionTokenSeq infer(const Observation&) override {
        if (!world_) throw BackendError("ExpertBackend: no world observed");
        return encode_command(expert_policy(*world_), vocab_);
    }

private:
    ActionVocabulary vocab_;
    std::optional<WorldState> world_;
};

class ToyPolicyBackend : public ReasoningBackend {
public:
    explicit ToyPolicyBackend(PolicyParams params, DecodeConfig decode = {})
        : params_(std::move(params)), decode_(decode) {
        if (!params_.frozen) params_.freeze();
    }

    ActionTokenSeq infer(const Observation& obs) override {
        return greedy_decode(params_, obs, decode_);
    }

    const PolicyParams& params() const { return params_; }

private:
    PolicyParams params_;
    DecodeConfig decode_;
};

/// Busy-waits a fixed synthetic compute time before answering; used to verify
/// the benchmark harness against a known ground-truth latency.
class DelayInjectingBackend : public ReasoningBackend {
public:
    DelayInjectingBackend(double delay_ms, std::unique_ptr<ReasoningBackend> inner = nullptr)
        : delay_ms_(delay_ms), inner_(std::move(inner)) {}

    ActionTokenSeq infer(const Observation& obs) override {
        const auto deadline = std::chrono::steady_clock::now() +
                              std::chrono::duration<double, std::milli>(delay_ms_);
        while (std::chrono::steady_clock::now() < deadline) { /* spin */ }
        if (inner_) return inner_->infer(obs);
        ActionTokenSeq seq;
        seq.tokens = {0, 0};
        return seq;
    }

    void observe_world(const WorldState& world) override {
        if (inner_) inner_->observe_world(world);
    }

private:
    double delay_ms_;
    std::unique_ptr<ReasoningBackend> inner_;
};

// ── closed-loop episode runner ──────────────────────────────────────────────

struct EpisodeConfig {
    double controller_dt = 0.01;       // s
    double reasoning_period = 0.1505;  // s, reference mean decision latency
    double max_duration = 30.0;        // s
    double success_radius = 0.1;       // m
    double staleness_limit = kDefaultStalenessLimitSec;  // s
    std::optional<double> goal_shift_time;               // s
    std::uint64_t seed = 0;

    void validate() const {
        if (!(controller_dt > 0.0) || !(controller_dt < reasoning_period))
            throw std::invalid_argument("EpisodeConfig: need 0 < controller_dt < reasoning_period");
        if (!(success_radius > 0.0))
            throw std::invalid_argument("EpisodeConfig: success_radius must be positive");
    }
};

struct Decision {
    double time = 0.0;
    std::optional<ActionTokenSeq> tokens;  // empty on fail-safe
    ActionCommand command;                 // zero on fail-safe
    bool fail_safe = false;
};

struct EpisodeResult {
    bool success = false;
    std::uint64_t steps = 0;  // controller steps executed
    double final_distance = 0.0;
    std::vector<Pose> trajectory;
    std::vector<Decision> decisions;
    std::uint64_t fail_safe_activations = 0;
    std::uint64_t heartbeat_publishes = 0;
};

/// Deterministic simulated-clock episode. Every reasoning period: render ->
/// infer -> format -> parse -> publish; the heartbeat controller republishes
/// at the controller rate and its output drives the unicycle. Backend or
/// parser failures publish the zero-velocity fail-safe for that period and
/// the episode continues.
inline EpisodeResult run_closed_loop(ReasoningBackend& backend, const ActionVocabulary& vocab,
                                     const EpisodeConfig& config, std::uint64_t world_seed) {
    config.validate();
    WorldState world = make_world(world_seed);
    std::mt19937_64 shift_rng(world_seed ^ 0x5F375A86ULL);

    Bus bus;
    HeartbeatController heartbeat(bus, "cmd_vel", "wheel_cmd", 1.0 / config.controller_dt,
                                  config.staleness_limit);

    EpisodeResult result;
    result.trajectory.push_back(world.robot);

    auto distance_to_goal = [&] {
        return std::hypot(world.active().x - world.robot.x,
                          world.active().y - world.robot.y);
    };

    double next_reasoning = 0.0;
    bool shifted = false;
    std::uint32_t cmd_seq = 0;
    const auto total_steps =
        static_cast<std::uint64_t>(config.max_duration / config.controller_dt + 0.5);

    for (std::uint64_t step = 0; step < total_steps; ++step) {
        const double t = static_cast<double>(step) * config.controller_dt;
        world.time = t;
        const auto now_ns = static_cast<std::uint64_t>(t * 1e9 + 0.5);

        if (config.goal_shift_time && !shifted && t + 1e-9 >= *config.goal_shift_time) {
            teleport_active_target(world, shift_rng);
            shifted = true;
        }

        // reasoning event first at equal timestamps
        if (t + 1e-9 >= next_reasoning) {
            Decision decision;
            decision.time = t;
            try {
                backend.observe_world(world);
                const Observation obs = render_observation(world);
                const ActionTokenSeq tokens = backend.infer(obs);
                const std::string line = format_action(tokens);
                const ParseResult parsed = parse_action_line(line, vocab);
                if (const auto* action = std::get_if<ParsedAction>(&parsed)) {
                    decision.tokens = action->tokens;
                    decision.command = action->command;
                } else {
                    decision.fail_safe = true;
                }
            } catch (const std::exception&) {
                decision.fail_safe = true;
            }
            if (decision.fail_safe) {
                decision.command = ActionCommand{};  // zero-velocity fail-safe
                ++result.fail_safe_activations;
            }
            bus.publish("cmd_vel", StampedTwist{twist_from_command(decision.command),
                                                cmd_seq++, now_ns, false});
            result.decisions.push_back(std::move(decision));
            next_reasoning += config.reasoning_period;
        }

        const StampedTwist applied = heartbeat.tick(now_ns);
        ++result.heartbeat_publishes;
        world.robot = step_unicycle(
            world.robot,
            ActionCommand{applied.twist.linear[0], applied.twist.angular[2]},
            config.controller_dt);
        result.trajectory.push_back(world.robot);
        ++result.steps;

        if (distance_to_goal() <= config.success_radius) {
            result.success = true;
            break;
        }
    }
    result.final_distance = distance_to_goal();
    return result;
}

// ── demonstration collection ────────────────────────────────────────────────

/// Expert rollouts rendered at the reasoning cadence; commands are tokenized
/// through the action codec so the dataset sees exactly what the policy must
/// reproduce.
inline std::vector<TrainSample> collect_dataset(std::uint32_t n_episodes, std::uint64_t seed,
                                                const ActionVocabulary& vocab,
                                                const EpisodeConfig& config = {}) {
    std::vector<TrainSample> dataset;
    for (std::uint32_t ep = 0; ep < n_episodes; ++ep) {
        WorldState world = make_world(seed + ep);
        double t = 0.0;
        while (t < config.max_duration) {
            const double dist = std::hypot(world.active().x - world.robot.x,
                                           world.active().y - world.robot.y);
            if (dist <= config.success_radius) break;
            const Observation obs = render_observation(world);
            const ActionTokenSeq tokens = encode_command(expert_policy(world), vocab);
            dataset.emplace_back(obs, tokens);
            // hold the de-tokenized command until the next reasoning tick
            const ActionCommand held = decode_tokens(tokens, vocab);
            double elapsed = 0.0;
            while (elapsed + 1e-9 < config.reasoning_period) {
                world.robot = step_unicycle(world.robot, held, config.controller_dt);
                elapsed += config.controller_dt;
            }
            t += elapsed;
        }
    }
    return dataset;
}

// ── latency statistics and benchmark ────────────────────────────────────────

struct LatencyReport {
    std::uint64_t runs = 0;
    double mean_ms = 0.0;
    double std_ms = 0.0;
    double min_ms = 0.0;
    double max_ms = 0.0;
    double hz = 0.0;  // 1000/mean, rounded half-up to 2 decimals
    std::uint64_t warmup_excluded = 0;
    bool degenerate_std = false;  // single sample: std reported as 0
};

inline double round_half_up_2dp(double x) {
    return std::floor(x * 100.0 + 0.5) / 100.0;
}

inline LatencyReport compute_stats(const std::vector<double>& samples_ms) {
    if (samples_ms.empty()) throw std::invalid_argument("compute_stats: no samples");
    LatencyReport r;
    r.runs = samples_ms.size();
    double total = 0.0;
    r.min_ms = samples_ms.front();
    r.max_ms = samples_ms.front();
    for (double s : samples_ms) {
        total += s;
        r.min_ms = std::min(r.min_ms, s);
        r.max_ms = std::max(r.max_ms, s);
    }
    r.mean_ms = total / static_cast<double>(samples_ms.size());
    if (samples_ms.size() < 2) {
        r.std_ms = 0.0;
        r.degenerate_std = true;
    } else {
        double ss = 0.0;
        for (double s : samples_ms) ss += (s - r.mean_ms) * (s - r.mean_ms);
        r.std_ms = std::sqrt(ss / static_cast<double>(samples_ms.size() - 1));
    }
    r.hz = round_half_up_2dp(1000.0 / r.mean_ms);
    return r;
}

/// Wall-clock end-to-end benchmark: each decision times render + infer +
/// format + parse. The first `warmup` decisions are excluded from statistics
/// but counted in the report.
inline LatencyReport run_latency_bench(ReasoningBackend& backend,
                                       const ActionVocabulary& vocab,
                                       std::uint64_t runs = 300, std::uint64_t warmup = 10,
                                       std::uint64_t world_seed = 0) {
    if (runs == 0) throw std::invalid_argument("run_latency_bench: runs must be positive");
    std::vector<double> samples;
    samples.reserve(runs);
    for (std::uint64_t i = 0; i < warmup + runs; ++i) {
        const WorldState world = make_world(world_seed + i);
        backend.observe_world(world);
        const auto start = std::chrono::steady_clock::now();
        const Observation obs = render_observation(world);
        const ActionTokenSeq tokens = backend.infer(obs);
        const std::string line = format_action(tokens);
        const ParseResult parsed = parse_action_line(line, vocab);
        const auto stop = std::chrono::steady_clock::now();
        (void)parsed;
        if (i >= warmup)
            samples.push_back(
                std::chrono::duration<double, std::milli>(stop - start).count());
    }
    LatencyReport report = compute_stats(samples);
    report.warmup_excluded = warmup;
    return report;
}

}  // namespace litevla
