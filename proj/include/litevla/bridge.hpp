// SPDX-License-Identifier: Apache-2.0
//
// In-process publish/subscribe bus, the Twist-equivalent wire codec with
// CRC-32 framing, and the fixed-rate heartbeat controller that decouples
// actuation from reasoning.
//
// Wire frame, 68 bytes little-endian:
//   [0..1]   u16 magic 0x4C56 ("LV")
//   [2]      u8  version = 1
//   [3]      u8  flags (bit 0 = stale)
//   [4..7]   u32 seq
//   [8..15]  u64 timestamp_ns (monotonic)
//   [16..63] 6 x f64 payload: linear xyz then angular xyz
//   [64..67] u32 CRC-32 over bytes 0..63

#pragma once

#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "litevla/action_space.hpp"
#include "litevla/util.hpp"

namespace litevla {

struct TwistMessage {
    double linear[3] = {0, 0, 0};   // m/s
    double angular[3] = {0, 0, 0};  // rad/s

    bool operator==(const TwistMessage& o) const {
        for (int i = 0; i < 3; ++i)
            if (linear[i] != o.linear[i] || angular[i] != o.angular[i]) return false;
        return true;
    }
};

inline TwistMessage twist_from_command(const ActionCommand& cmd) {
    TwistMessage m;
    m.linear[0] = cmd.linear_velocity;
    m.angular[2] = cmd.angular_velocity;
    return m;
}

// ── wire codec ──────────────────────────────────────────────────────────────

inline constexpr std::size_t kWireFrameBytes = 68;
inline constexpr std::uint16_t kWireMagic = 0x4C56;
inline constexpr std::uint8_t kWireVersion = 1;

enum class FrameErrorKind { length, magic, version, crc };

struct FrameError : std::runtime_error {
    FrameErrorKind kind;
    FrameError(FrameErrorKind k, const std::string& what)
        : std::runtime_error(what), kind(k) {}
};

struct StampedTwist {
    TwistMessage twist;
    std::uint32_t seq = 0;
    std::uint64_t timestamp_ns = 0;
    bool stale = false;
};

inline std::vector<std::uint8_t> encode_twist(const TwistMessage& msg, std::uint32_t seq,
                                              std::uint64_t timestamp_ns, bool stale) {
    std::vector<std::uint8_t> out;
    out.reserve(kWireFrameBytes);
    put_le(out, kWireMagic);
    out.push_back(kWireVersion);
    out.push_back(stale ? 0x01 : 0x00);
    put_le(out, seq);
    put_le(out, timestamp_ns);
    for (double x : msg.linear) put_le(out, x);
    for (double x : msg.angular) put_le(out, x);
    put_le(out, crc32(std::span(out).first(64)));
    return out;
}

inline StampedTwist decode_twist(std::span<const std::uint8_t> frame) {
    if (frame.size() != kWireFrameBytes)
        throw FrameError(FrameErrorKind::length,
                         "frame length " + std::to_string(frame.size()) + " != 68");
    if (crc32(frame.first(64)) != get_le<std::uint32_t>(frame, 64))
        throw FrameError(FrameErrorKind::crc, "crc mismatch");
    if (get_le<std::uint16_t>(frame, 0) != kWireMagic)
        throw FrameError(FrameErrorKind::magic, "bad magic");
    if (frame[2] != kWireVersion)
        throw FrameError(FrameErrorKind::version,
                         "unsupported version " + std::to_string(frame[2]));
    StampedTwist st;
    st.stale = (frame[3] & 0x01) != 0;
    st.seq = get_le<std::uint32_t>(frame, 4);
    st.timestamp_ns = get_le<std::uint64_t>(frame, 8);
    for (int i = 0; i < 3; ++i) st.twist.linear[i] = get_le<double>(frame, 16 + 8 * i);
    for (int i = 0; i < 3; ++i) st.twist.angular[i] = get_le<double>(frame, 40 + 8 * i);
    return st;
}

// ── in-process bus ──────────────────────────────────────────────────────────

class Subscription {
public:
    void push(const StampedTwist& msg) {
        std::lock_guard lock(mutex_);
        queue_.push_back(msg);
        cv_.notify_all();
    }

    std::optional<StampedTwist> try_pop() {
        std::lock_guard lock(mutex_);
        if (queue_.empty()) return std::nullopt;
        StampedTwist msg = queue_.front();
        queue_.pop_front();
        return msg;
    }

    /// Discards everything but the newest queued message.
    std::optional<StampedTwist> drain_latest() {
        std::lock_guard lock(mutex_);
        if (queue_.empty()) return std::nullopt;
        StampedTwist msg = queue_.back();
        queue_.clear();
        return msg;
    }

    std::optional<StampedTwist> pop_wait(std::chrono::milliseconds timeout) {
        std::unique_lock lock(mutex_);
        if (!cv_.wait_for(lock, timeout, [&] { return !queue_.empty(); }))
            return std::nullopt;
        StampedTwist msg = queue_.front();
        queue_.pop_front();
        return msg;
    }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return queue_.size();
    }

private:
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<StampedTwist> queue_;
};

/// Topic-keyed pub/sub with at-most-one retained message per topic. Delivery
/// preserves per-publisher order; new subscribers immediately receive the
/// retained message if present.
class Bus {
public:
    void publish(const std::string& topic, const StampedTwist& msg) {
        std::vector<std::shared_ptr<Subscription>> subs;
        {
            std::lock_guard lock(mutex_);
            Topic& t = topics_[topic];
            t.retained = msg;
            subs = t.subscribers;
        }
        for (auto& s : subs) s->push(msg);
    }

    std::shared_ptr<Subscription> subscribe(const std::string& topic) {
        auto sub = std::make_shared<Subscription>();
        std::optional<StampedTwist> retained;
        {
            std::lock_guard lock(mutex_);
            Topic& t = topics_[topic];
            t.subscribers.push_back(sub);
            retained = t.retained;
        }
        if (retained) sub->push(*retained);
        return sub;
    }

    std::optional<StampedTwist> retained(const std::string& topic) const {
        std::lock_guard lock(mutex_);
        auto it = topics_.find(topic);
        return it == topics_.end() ? std::nullopt : it->second.retained;
    }

private:
    struct Topic {
        std::optional<StampedTwist> retained;
        std::vector<std::shared_ptr<Subscription>> subscribers;
    };
    mutable std::mutex mutex_;
    std::map<std::string, Topic> topics_;
};

// ── heartbeat controller ────────────────────────────────────────────────────

inline constexpr double kDefaultHeartbeatHz = 100.0;
// two reasoning periods at the reference 150.5 ms latency
inline constexpr double kDefaultStalenessLimitSec = 0.301;

/// Fixed-rate republisher. Each tick forwards the most recent command from the
/// command topic; when no command newer than the staleness limit exists it
/// publishes a zero-velocity frame with the stale flag set. Ticks are driven
/// externally (simulated clock) or by a wall-clock loop.
class HeartbeatController {
public:
    HeartbeatController(Bus& bus, std::string command_topic, std::string output_topic,
                        double rate_hz = kDefaultHeartbeatHz,
                        double staleness_limit_sec = kDefaultStalenessLimitSec)
        : bus_(bus),
          output_topic_(std::move(output_topic)),
          rate_hz_(rate_hz),
          staleness_limit_sec_(staleness_limit_sec) {
        if (!(rate_hz > 0.0))
            throw std::invalid_argument("HeartbeatController: rate must be positive");
        if (staleness_limit_sec <= 0.0)
            throw std::invalid_argument("HeartbeatController: staleness limit must be positive");
        subscription_ = bus.subscribe(command_topic);
    }

    double rate_hz() const { return rate_hz_; }
    std::uint64_t period_ns() const {
        return static_cast<std::uint64_t>(1e9 / rate_hz_ + 0.5);
    }

    /// One controller tick at monotonic time `now_ns`.
    StampedTwist tick(std::uint64_t now_ns) {
        if (auto latest = subscription_->drain_latest()) last_command_ = *latest;

        StampedTwist out;
        out.seq = next_seq_++;
        out.timestamp_ns = now_ns;
        const bool limit_enabled = std::isfinite(staleness_limit_sec_);
        const std::uint64_t limit_ns =
            limit_enabled ? static_cast<std::uint64_t>(staleness_limit_sec_ * 1e9) : 0;
        if (last_command_ &&
            (!limit_enabled || now_ns - last_command_->timestamp_ns <= limit_ns)) {
            out.twist = last_command_->twist;
            out.stale = false;
        } else {
            out.twist = TwistMessage{};  // zero-velocity fail-safe
            out.stale = true;
        }
        bus_.publish(output_topic_, out);
        return out;
    }

private:
    Bus& bus_;
    std::string output_topic_;
    double rate_hz_;
    double staleness_limit_sec_;
    std::shared_ptr<Subscription> subscription_;
    std::optional<StampedTwist> last_command_;
    std::uint32_t next_seq_ = 0;
};

}  // namespace litevla
