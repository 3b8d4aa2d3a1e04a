// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>

#include "litevla/action_parser.hpp"

using namespace litevla;

namespace {
const ActionVocabulary kVocab;  // 32/32 bins, defaults

bool accepted(const ParseResult& r) { return std::holds_alternative<ParsedAction>(r); }

const ParseRejection& rejection(const ParseResult& r) {
    return std::get<ParseRejection>(r);
}
}  // namespace

TEST_CASE("valid line decodes to the bin midpoints") {
    const ParseResult r = parse_action_line("ACTION 16 15\n", kVocab);
    REQUIRE(accepted(r));
    const auto& action = std::get<ParsedAction>(r);
    CHECK(action.command.linear_velocity == 0.015625);
    CHECK(action.command.angular_velocity == -0.046875);
}

TEST_CASE("rejections carry class and byte offset") {
    auto r = parse_action_line("ACTION 99 0", kVocab);
    REQUIRE(!accepted(r));
    CHECK(rejection(r).error_class == ParseErrorClass::range);
    CHECK(rejection(r).byte_offset == 7);

    r = parse_action_line("action 1 2", kVocab);
    REQUIRE(!accepted(r));
    CHECK(rejection(r).error_class == ParseErrorClass::syntax);
    CHECK(rejection(r).byte_offset == 0);

    r = parse_action_line("ACTION 1 2 " + std::string(60, 'x'), kVocab);
    REQUIRE(!accepted(r));
    CHECK(rejection(r).error_class == ParseErrorClass::length);

    // leading zeros, double spaces, tabs, signs: all syntax errors
    for (const char* bad : {"ACTION 01 2", "ACTION  1 2", "ACTION\t1 2", "ACTION -1 2",
                            "ACTION 1 2 ", "ACTION 1", "", "ACTION 1 2\n\n"})
        CHECK(!accepted(parse_action_line(bad, kVocab)));
}

TEST_CASE("parse after format is the identity over all token pairs") {
    for (std::uint32_t v = 0; v < kVocab.v_bin_count; ++v)
        for (std::uint32_t w = 0; w < kVocab.w_bin_count; ++w) {
            ActionTokenSeq t;
            t.tokens = {v, w};
            const ParseResult r = parse_action_line(format_action(t), kVocab);
            REQUIRE(accepted(r));
            CHECK(std::get<ParsedAction>(r).tokens == t);
        }
    ActionTokenSeq one;
    one.tokens = {3};
    CHECK_THROWS_AS(format_action(one), std::invalid_argument);
}

TEST_CASE("parser is total over random bytes and mutated valid lines") {
    std::mt19937_64 rng(99);
    std::size_t spurious = 0;
    for (int trial = 0; trial < 100000; ++trial) {
        std::string line;
        const std::size_t len = rng() % 80;
        for (std::size_t i = 0; i < len; ++i)
            line.push_back(static_cast<char>(rng() & 0xFF));
        const ParseResult r = parse_action_line(line, kVocab);
        if (accepted(r)) {
            // whatever was accepted must re-serialize to a canonical match
            const auto& a = std::get<ParsedAction>(r);
            std::string canon = format_action(a.tokens);
            if (line != canon && line + "\n" != canon) ++spurious;
        }
    }
    CHECK(spurious == 0);

    // random single-byte mutations of a valid line never crash
    const std::string valid = "ACTION 12 30\n";
    for (int trial = 0; trial < 20000; ++trial) {
        std::string mutated = valid;
        mutated[rng() % mutated.size()] = static_cast<char>(rng() & 0xFF);
        (void)parse_action_line(mutated, kVocab);
    }
}
