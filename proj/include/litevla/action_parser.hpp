// SPDX-License-Identifier: Apache-2.0
//
// Structured action-line parser: the fail-stop gate between model output and
// actuation. Grammar (ASCII, case-sensitive):
//
//   line  := "ACTION" SP int SP int ["\n"]
//   int   := "0" | nonzero digit*            (no leading zeros, no sign)
//
// A line longer than 64 bytes is rejected before any grammar work. A rejected
// line never produces a command.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "litevla/action_space.hpp"

namespace litevla {

inline constexpr std::size_t kMaxActionLineBytes = 64;

enum class ParseErrorClass { syntax, range, length };

struct ParseRejection {
    ParseErrorClass error_class;
    std::size_t byte_offset;
    std::string message;
};

struct ParsedAction {
    ActionTokenSeq tokens;  // [v_bin, w_bin]
    ActionCommand command;
};

using ParseResult = std::variant<ParsedAction, ParseRejection>;

namespace detail {

// Parses a decimal integer with no leading zeros. Returns nullopt on syntax
// failure; `end` is advanced past the digits consumed.
inline std::optional<std::uint64_t> parse_decimal(std::string_view text, std::size_t& pos) {
    const std::size_t start = pos;
    std::uint64_t value = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
        if (value > (UINT64_MAX - 9) / 10) return std::nullopt;  // overflow
        value = value * 10 + static_cast<std::uint64_t>(text[pos] - '0');
        ++pos;
    }
    const std::size_t len = pos - start;
    if (len == 0) return std::nullopt;
    if (len > 1 && text[start] == '0') return std::nullopt;  // leading zero
    return value;
}

}  // namespace detail

/// Total function over byte strings: returns either a validated command or a
/// classified rejection with a byte offset. Never throws on any input.
inline ParseResult parse_action_line(std::string_view line, const ActionVocabulary& vocab) {
    if (line.size() > kMaxActionLineBytes)
        return ParseRejection{ParseErrorClass::length, kMaxActionLineBytes,
                              "line exceeds 64 bytes"};

    // optional single trailing newline
    std::string_view body = line;
    if (!body.empty() && body.back() == '\n') body.remove_suffix(1);

    static constexpr std::string_view kKeyword = "ACTION";
    if (body.substr(0, kKeyword.size()) != kKeyword)
        return ParseRejection{ParseErrorClass::syntax, 0, "expected ACTION keyword"};
    std::size_t pos = kKeyword.size();

    auto expect_space = [&](void) -> bool {
        if (pos < body.size() && body[pos] == ' ') { ++pos; return true; }
        return false;
    };

    if (!expect_space())
        return ParseRejection{ParseErrorClass::syntax, pos, "expected single space"};
    const std::size_t v_offset = pos;
    auto v_value = detail::parse_decimal(body, pos);
    if (!v_value)
        return ParseRejection{ParseErrorClass::syntax, v_offset, "malformed v token"};

    if (!expect_space())
        return ParseRejection{ParseErrorClass::syntax, pos, "expected single space"};
    const std::size_t w_offset = pos;
    auto w_value = detail::parse_decimal(body, pos);
    if (!w_value)
        return ParseRejection{ParseErrorClass::syntax, w_offset, "malformed w token"};

    if (pos != body.size())
        return ParseRejection{ParseErrorClass::syntax, pos, "trailing bytes after tokens"};

    if (*v_value >= vocab.v_bin_count)
        return ParseRejection{ParseErrorClass::range, v_offset,
                              "v token " + std::to_string(*v_value) + " out of range"};
    if (*w_value >= vocab.w_bin_count)
        return ParseRejection{ParseErrorClass::range, w_offset,
                              "w token " + std::to_string(*w_value) + " out of range"};

    ParsedAction action;
    action.tokens.tokens = {static_cast<std::uint32_t>(*v_value),
                            static_cast<std::uint32_t>(*w_value)};
    action.command = decode_tokens(action.tokens, vocab);
    return action;
}

/// Canonical serialization `ACTION <v> <w>\n`; inverse of parse_action_line.
inline std::string format_action(const ActionTokenSeq& seq) {
    if (seq.tokens.size() != 2)
        throw std::invalid_argument("format_action: expected exactly 2 tokens");
    return "ACTION " + std::to_string(seq.tokens[0]) + " " +
           std::to_string(seq.tokens[1]) + "\n";
}

}  // namespace litevla
