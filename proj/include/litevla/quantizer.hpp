// SPDX-License-Identifier: Apache-2.0
//
// Blockwise 4-bit post-training weight quantization.
//
// Codec "Q4B32": blocks of 32 elements, asymmetric min/max with an f32 scale
// and f32 base. Packed layout (little-endian): 4 bytes scale, 4 bytes base,
// 16 bytes of codes with element 2k in the low nibble of byte k.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "litevla/util.hpp"

namespace litevla {

inline constexpr std::size_t kQuantBlockSize = 32;
inline constexpr std::size_t kQuantBlockBytes = 24;  // 4 + 4 + 16

struct QuantBlock {
    float scale = 0.0f;
    float base = 0.0f;
    std::array<std::uint8_t, kQuantBlockSize> codes{};  // each in [0, 15]
};

struct QuantTensor {
    std::vector<std::uint64_t> shape;
    std::vector<QuantBlock> blocks;  // row-major coverage

    std::uint64_t element_count() const {
        std::uint64_t n = 1;
        for (auto d : shape) n *= d;
        return n;
    }
};

inline QuantBlock quantize_block(std::span<const double> values) {
    if (values.size() != kQuantBlockSize)
        throw std::invalid_argument("quantize_block: expected 32 values");
    double lo = values[0], hi = values[0];
    for (double x : values) {
        if (!std::isfinite(x))
            throw std::invalid_argument("quantize_block: non-finite input");
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    QuantBlock block;
    block.base = static_cast<float>(lo);
    if (hi == lo) return block;  // scale 0, all codes 0
    block.scale = static_cast<float>((hi - lo) / 15.0);
    const double s = block.scale, m = block.base;
    for (std::size_t i = 0; i < kQuantBlockSize; ++i) {
        // round-half-up
        auto code = static_cast<std::int64_t>(std::floor((values[i] - m) / s + 0.5));
        block.codes[i] = static_cast<std::uint8_t>(std::clamp<std::int64_t>(code, 0, 15));
    }
    return block;
}

inline void dequantize_block(const QuantBlock& block, std::span<double> out) {
    for (std::size_t i = 0; i < kQuantBlockSize; ++i)
        out[i] = static_cast<double>(block.base) +
                 static_cast<double>(block.scale) * block.codes[i];
}

inline QuantTensor quantize_tensor(std::span<const double> data,
                                   std::vector<std::uint64_t> shape) {
    std::uint64_t n = 1;
    for (auto d : shape) n *= d;
    if (n != data.size() || n % kQuantBlockSize != 0)
        throw std::invalid_argument(
            "quantize_tensor: element count must be a multiple of 32; "
            "choose block-aligned dimensions");
    QuantTensor qt;
    qt.shape = std::move(shape);
    qt.blocks.reserve(n / kQuantBlockSize);
    for (std::size_t i = 0; i < n; i += kQuantBlockSize)
        qt.blocks.push_back(quantize_block(data.subspan(i, kQuantBlockSize)));
    return qt;
}

inline std::vector<double> dequantize_tensor(const QuantTensor& qt) {
    std::vector<double> out(qt.element_count());
    for (std::size_t b = 0; b < qt.blocks.size(); ++b)
        dequantize_block(qt.blocks[b], std::span(out).subspan(b * kQuantBlockSize,
                                                              kQuantBlockSize));
    return out;
}

// Packed byte layout used by the model container.
inline void pack_block(const QuantBlock& block, std::vector<std::uint8_t>& out) {
    put_le(out, block.scale);
    put_le(out, block.base);
    for (std::size_t k = 0; k < kQuantBlockSize / 2; ++k)
        out.push_back(static_cast<std::uint8_t>((block.codes[2 * k] & 0x0F) |
                                                (block.codes[2 * k + 1] << 4)));
}

inline QuantBlock unpack_block(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kQuantBlockBytes)
        throw std::invalid_argument("unpack_block: need 24 bytes");
    QuantBlock block;
    block.scale = get_le<float>(bytes, 0);
    block.base = get_le<float>(bytes, 4);
    for (std::size_t k = 0; k < kQuantBlockSize / 2; ++k) {
        block.codes[2 * k] = bytes[8 + k] & 0x0F;
        block.codes[2 * k + 1] = bytes[8 + k] >> 4;
    }
    return block;
}

}  // namespace litevla
