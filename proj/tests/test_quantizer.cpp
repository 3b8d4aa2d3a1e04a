// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "litevla/quantizer.hpp"

using namespace litevla;

namespace {
std::vector<double> random_block(std::mt19937_64& rng, double lo = -2.0, double hi = 2.0) {
    std::vector<double> v(kQuantBlockSize);
    for (auto& x : v) x = lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1p-53;
    return v;
}
}  // namespace

TEST_CASE("constant block degenerates to scale 0 and exact round trip") {
    std::vector<double> values(kQuantBlockSize, 0.7);
    const QuantBlock b = quantize_block(values);
    CHECK(b.scale == 0.0f);
    CHECK(b.base == 0.7f);
    std::vector<double> back(kQuantBlockSize);
    dequantize_block(b, back);
    for (double x : back) CHECK(x == static_cast<double>(0.7f));
}

TEST_CASE("lattice-aligned block round-trips exactly") {
    std::vector<double> values(kQuantBlockSize);
    for (std::size_t i = 0; i < kQuantBlockSize; ++i) values[i] = static_cast<double>(i % 16);
    const QuantBlock b = quantize_block(values);
    CHECK(b.scale == 1.0f);
    CHECK(b.base == 0.0f);
    std::vector<double> back(kQuantBlockSize);
    dequantize_block(b, back);
    CHECK(back == values);
    CHECK(b.codes[15] == 15);  // code 15 reconstructs the block max
}

TEST_CASE("per-element error bounded by scale/2 over random blocks") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto values = random_block(rng);
        const QuantBlock b = quantize_block(values);
        std::vector<double> back(kQuantBlockSize);
        dequantize_block(b, back);
        for (std::size_t i = 0; i < kQuantBlockSize; ++i)
            CHECK(std::abs(values[i] - back[i]) <= b.scale / 2.0 + 1e-6);
        // dequantized value is non-decreasing in code
        for (int c = 0; c < 15; ++c)
            CHECK(b.base + b.scale * c <= b.base + b.scale * (c + 1));
    }
}

TEST_CASE("quantization is idempotent on its own range") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        const QuantBlock b = quantize_block(random_block(rng));
        std::vector<double> once(kQuantBlockSize);
        dequantize_block(b, once);
        std::vector<double> twice(kQuantBlockSize);
        dequantize_block(quantize_block(once), twice);
        CHECK(once == twice);
    }
}

TEST_CASE("non-finite input and misaligned tensors are rejected") {
    std::vector<double> values(kQuantBlockSize, 0.0);
    values[5] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(quantize_block(values), std::invalid_argument);

    std::vector<double> odd(33, 1.0);
    CHECK_THROWS_AS(quantize_tensor(odd, {33}), std::invalid_argument);
}

TEST_CASE("tensor quantization preserves shape and packs to 24 bytes per block") {
    std::mt19937_64 rng(3);
    std::vector<double> data;
    for (int i = 0; i < 4; ++i) {
        auto b = random_block(rng);
        data.insert(data.end(), b.begin(), b.end());
    }
    const QuantTensor qt = quantize_tensor(data, {4, 32});
    CHECK(qt.blocks.size() == 4);
    CHECK(dequantize_tensor(qt).size() == data.size());

    std::vector<std::uint8_t> packed;
    pack_block(qt.blocks[0], packed);
    REQUIRE(packed.size() == kQuantBlockBytes);
    const QuantBlock restored = unpack_block(packed);
    CHECK(restored.scale == qt.blocks[0].scale);
    CHECK(restored.base == qt.blocks[0].base);
    CHECK(restored.codes == qt.blocks[0].codes);

    // determinism: identical input, identical packed bytes
    std::vector<std::uint8_t> packed2;
    pack_block(quantize_block(std::span(data).first(kQuantBlockSize)), packed2);
    CHECK(packed == packed2);
}
