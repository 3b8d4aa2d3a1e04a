// SPDX-License-Identifier: Apache-2.0
//
// Discrete action token vocabulary and the bidirectional mapping between
// token sequences and continuous (v, omega) velocity commands.
//
// Layout: one command is exactly two tokens. Token 0 selects a linear-velocity
// bin, token 1 an angular-velocity bin; each entry stores the zero-based bin
// index within its own sub-vocabulary. The model-side vocabulary is the
// concatenation [v-tokens | omega-tokens], so the global model id of entry 1
// is `bin + v_bin_count`.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace litevla {

struct ActionCommand {
    double linear_velocity = 0.0;   // m/s
    double angular_velocity = 0.0;  // rad/s

    bool operator==(const ActionCommand&) const = default;
};

struct ActionVocabulary {
    std::uint32_t v_bin_count = 32;
    std::uint32_t w_bin_count = 32;
    double v_min = -0.5, v_max = 0.5;   // m/s
    double w_min = -1.5, w_max = 1.5;   // rad/s

    ActionVocabulary() = default;
    ActionVocabulary(std::uint32_t v_bins, std::uint32_t w_bins,
                     double v_lo, double v_hi, double w_lo, double w_hi)
        : v_bin_count(v_bins), w_bin_count(w_bins),
          v_min(v_lo), v_max(v_hi), w_min(w_lo), w_max(w_hi) {
        if (v_bin_count < 2 || w_bin_count < 2)
            throw std::invalid_argument("ActionVocabulary: bin counts must be >= 2");
        if (!(v_min < v_max) || !(w_min < w_max))
            throw std::invalid_argument("ActionVocabulary: range min must be < max");
    }

    std::uint32_t token_space_size() const { return v_bin_count + w_bin_count; }
};

struct ActionTokenSeq {
    std::vector<std::uint32_t> tokens;  // per-position bin indices
    std::uint32_t max_len = 12;

    bool operator==(const ActionTokenSeq& other) const { return tokens == other.tokens; }
};

struct DecodeError : std::runtime_error {
    std::size_t position;  // offending token position (or sequence length slot)
    DecodeError(std::size_t pos, const std::string& what)
        : std::runtime_error(what), position(pos) {}
};

namespace detail {

inline double bin_midpoint(std::uint32_t bin, std::uint32_t bins, double lo, double hi) {
    return lo + (static_cast<double>(bin) + 0.5) * (hi - lo) / static_cast<double>(bins);
}

inline std::uint32_t nearest_bin(double x, std::uint32_t bins, double lo, double hi) {
    const double clamped = x < lo ? lo : (x > hi ? hi : x);
    const double width = (hi - lo) / static_cast<double>(bins);
    auto bin = static_cast<std::int64_t>(std::floor((clamped - lo) / width));
    if (bin >= static_cast<std::int64_t>(bins)) bin = bins - 1;  // top edge
    if (bin < 0) bin = 0;
    return static_cast<std::uint32_t>(bin);
}

}  // namespace detail

/// Maps a two-token sequence to the midpoint velocities of the selected bins.
inline ActionCommand decode_tokens(const ActionTokenSeq& seq, const ActionVocabulary& vocab) {
    if (seq.tokens.size() != 2)
        throw DecodeError(seq.tokens.size() > 2 ? 2 : seq.tokens.size(),
                          "decode_tokens: expected exactly 2 tokens, got " +
                              std::to_string(seq.tokens.size()));
    if (seq.tokens[0] >= vocab.v_bin_count)
        throw DecodeError(0, "decode_tokens: v-token " + std::to_string(seq.tokens[0]) +
                                 " out of range [0, " + std::to_string(vocab.v_bin_count) + ")");
    if (seq.tokens[1] >= vocab.w_bin_count)
        throw DecodeError(1, "decode_tokens: w-token " + std::to_string(seq.tokens[1]) +
                                 " out of range [0, " + std::to_string(vocab.w_bin_count) + ")");
    return ActionCommand{
        detail::bin_midpoint(seq.tokens[0], vocab.v_bin_count, vocab.v_min, vocab.v_max),
        detail::bin_midpoint(seq.tokens[1], vocab.w_bin_count, vocab.w_min, vocab.w_max)};
}

/// Clamps the command into range and maps each value to its nearest bin.
inline ActionTokenSeq encode_command(const ActionCommand& cmd, const ActionVocabulary& vocab) {
    if (!std::isfinite(cmd.linear_velocity) || !std::isfinite(cmd.angular_velocity))
        throw std::invalid_argument("encode_command: non-finite velocity");
    ActionTokenSeq seq;
    seq.tokens = {detail::nearest_bin(cmd.linear_velocity, vocab.v_bin_count,
                                      vocab.v_min, vocab.v_max),
                  detail::nearest_bin(cmd.angular_velocity, vocab.w_bin_count,
                                      vocab.w_min, vocab.w_max)};
    return seq;
}

}  // namespace litevla
