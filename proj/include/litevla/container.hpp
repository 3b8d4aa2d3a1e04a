// SPDX-License-Identifier: Apache-2.0
//
// Bit-exact reader/writer for a GGUF-style model container.
//
// File layout (all little-endian):
//   magic "GGUF" | u32 version=3 | u64 tensor_count | u64 metadata_kv_count
//   metadata KVs: (u64 key_len, key bytes, u32 type tag, value)
//   tensor infos: (u64 name_len, name, u32 n_dims, u64 dims[n_dims],
//                  u32 dtype, u64 offset-into-data-region)
//   zero padding to a 32-byte boundary, then tensor payloads in declaration
//   order, each padded so its offset is a multiple of 32.
//
// Supported KV tags are the GGUF v3 ids for uint32 (4), float32 (6), bool (7),
// string (8) and uint64 (10). Dtypes: 0 = F32, 1000 = Q4B32 (this project's
// private 4-bit codec; deliberately outside the GGML id space).

#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "litevla/quantizer.hpp"
#include "litevla/util.hpp"

namespace litevla {

inline constexpr std::uint32_t kContainerVersion = 3;
inline constexpr std::uint64_t kContainerAlignment = 32;
inline constexpr std::size_t kMaxTensorNameBytes = 64;

enum class TensorDtype : std::uint32_t { f32 = 0, q4b32 = 1000 };

// GGUF v3 tag ids for the supported subset.
enum class MetaTag : std::uint32_t {
    uint32 = 4,
    float32 = 6,
    boolean = 7,
    string = 8,
    uint64 = 10,
};

using MetadataValue =
    std::variant<std::uint32_t, float, bool, std::string, std::uint64_t>;

struct Tensor {
    std::string name;
    std::vector<std::uint64_t> dims;  // at most 4
    TensorDtype dtype = TensorDtype::f32;
    std::vector<std::uint8_t> payload;  // packed bytes per dtype

    std::uint64_t element_count() const {
        std::uint64_t n = 1;
        for (auto d : dims) n *= d;
        return n;
    }

    std::uint64_t expected_payload_bytes() const {
        const std::uint64_t n = element_count();
        return dtype == TensorDtype::f32 ? 4 * n : kQuantBlockBytes * (n / kQuantBlockSize);
    }
};

struct Model {
    std::vector<std::pair<std::string, MetadataValue>> metadata;  // ordered
    std::vector<Tensor> tensors;

    const MetadataValue* find(const std::string& key) const {
        for (const auto& [k, v] : metadata)
            if (k == key) return &v;
        return nullptr;
    }
    const Tensor* find_tensor(const std::string& name) const {
        for (const auto& t : tensors)
            if (t.name == name) return &t;
        return nullptr;
    }
};

struct ContainerError : std::runtime_error {
    std::size_t offset;  // byte offset of the failure in the stream
    ContainerError(std::size_t off, const std::string& what)
        : std::runtime_error(what + " at offset " + std::to_string(off)), offset(off) {}
};

// ── writing ─────────────────────────────────────────────────────────────────

namespace detail {

inline void put_string(std::vector<std::uint8_t>& out, const std::string& s) {
    put_le<std::uint64_t>(out, s.size());
    out.insert(out.end(), s.begin(), s.end());
}

inline void put_metadata_value(std::vector<std::uint8_t>& out, const MetadataValue& v) {
    if (const auto* u32 = std::get_if<std::uint32_t>(&v)) {
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(MetaTag::uint32));
        put_le(out, *u32);
    } else if (const auto* f = std::get_if<float>(&v)) {
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(MetaTag::float32));
        put_le(out, *f);
    } else if (const auto* b = std::get_if<bool>(&v)) {
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(MetaTag::boolean));
        out.push_back(*b ? 1 : 0);
    } else if (const auto* s = std::get_if<std::string>(&v)) {
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(MetaTag::string));
        put_string(out, *s);
    } else {
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(MetaTag::uint64));
        put_le(out, std::get<std::uint64_t>(v));
    }
}

}  // namespace detail

/// Serializes a model; byte-deterministic for identical inputs.
inline std::vector<std::uint8_t> write_container(const Model& model) {
    for (std::size_t i = 0; i < model.tensors.size(); ++i) {
        const Tensor& t = model.tensors[i];
        if (t.name.empty() || t.name.size() > kMaxTensorNameBytes)
            throw std::invalid_argument("write_container: bad tensor name '" + t.name + "'");
        if (t.dims.size() > 4)
            throw std::invalid_argument("write_container: more than 4 dims: " + t.name);
        if (t.dtype != TensorDtype::f32 && t.dtype != TensorDtype::q4b32)
            throw std::invalid_argument("write_container: unsupported dtype: " + t.name);
        if (t.dtype == TensorDtype::q4b32 && t.element_count() % kQuantBlockSize != 0)
            throw std::invalid_argument("write_container: Q4B32 tensor not block-aligned: " +
                                        t.name);
        if (t.payload.size() != t.expected_payload_bytes())
            throw std::invalid_argument("write_container: payload size mismatch: " + t.name);
        for (std::size_t j = i + 1; j < model.tensors.size(); ++j)
            if (model.tensors[j].name == t.name)
                throw std::invalid_argument("write_container: duplicate tensor name: " +
                                            t.name);
    }

    std::vector<std::uint8_t> out;
    out.insert(out.end(), {'G', 'G', 'U', 'F'});
    put_le<std::uint32_t>(out, kContainerVersion);
    put_le<std::uint64_t>(out, model.tensors.size());
    put_le<std::uint64_t>(out, model.metadata.size());

    for (const auto& [key, value] : model.metadata) {
        detail::put_string(out, key);
        detail::put_metadata_value(out, value);
    }

    // data-region offsets are assigned in declaration order, 32-byte aligned
    std::vector<std::uint64_t> offsets;
    std::uint64_t cursor = 0;
    for (const Tensor& t : model.tensors) {
        offsets.push_back(cursor);
        cursor += t.payload.size();
        cursor = (cursor + kContainerAlignment - 1) / kContainerAlignment * kContainerAlignment;
    }

    for (std::size_t i = 0; i < model.tensors.size(); ++i) {
        const Tensor& t = model.tensors[i];
        detail::put_string(out, t.name);
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.dims.size()));
        for (auto d : t.dims) put_le<std::uint64_t>(out, d);
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.dtype));
        put_le<std::uint64_t>(out, offsets[i]);
    }

    while (out.size() % kContainerAlignment != 0) out.push_back(0);
    const std::size_t data_start = out.size();
    for (std::size_t i = 0; i < model.tensors.size(); ++i) {
        out.resize(data_start + offsets[i], 0);
        out.insert(out.end(), model.tensors[i].payload.begin(),
                   model.tensors[i].payload.end());
    }
    return out;
}

// ── reading ─────────────────────────────────────────────────────────────────

namespace detail {

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t pos() const { return pos_; }

    // wraparound-safe remaining-bytes check
    std::size_t remaining() const {
        return pos_ <= bytes_.size() ? bytes_.size() - pos_ : 0;
    }

    template <typename T>
    T read(const char* what) {
        if (remaining() < sizeof(T))
            throw ContainerError(pos_, std::string("truncated while reading ") + what);
        T v = get_le<T>(bytes_, pos_);
        pos_ += sizeof(T);
        return v;
    }

    std::string read_string(const char* what) {
        const std::size_t at = pos_;
        auto len = read<std::uint64_t>(what);
        if (len > remaining())
            throw ContainerError(at, std::string("truncated string for ") + what);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_),
                      static_cast<std::size_t>(len));
        pos_ += static_cast<std::size_t>(len);
        return s;
    }

    std::span<const std::uint8_t> read_bytes(std::size_t n, const std::string& what) {
        if (n > remaining())
            throw ContainerError(pos_, "truncated payload for " + what);
        auto s = bytes_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    void seek(std::size_t p) { pos_ = p; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

inline MetadataValue read_metadata_value(ByteReader& r, const std::string& key) {
    const std::size_t tag_at = r.pos();
    auto tag = r.read<std::uint32_t>("metadata tag");
    switch (static_cast<MetaTag>(tag)) {
        case MetaTag::uint32: return r.read<std::uint32_t>("uint32 value");
        case MetaTag::float32: return r.read<float>("float32 value");
        case MetaTag::boolean: {
            auto b = r.read<std::uint8_t>("bool value");
            if (b > 1) throw ContainerError(r.pos() - 1, "bad bool encoding for " + key);
            return b == 1;
        }
        case MetaTag::string: return r.read_string("string value");
        case MetaTag::uint64: return r.read<std::uint64_t>("uint64 value");
        default:
            throw ContainerError(tag_at, "unknown metadata tag " + std::to_string(tag) +
                                             " for key '" + key + "'");
    }
}

}  // namespace detail

/// Exact inverse of write_container on well-formed input. Every malformed
/// input raises a position-annotated ContainerError.
inline Model read_container(std::span<const std::uint8_t> bytes) {
    detail::ByteReader r(bytes);
    if (bytes.size() < 4 || bytes[0] != 'G' || bytes[1] != 'G' || bytes[2] != 'U' ||
        bytes[3] != 'F')
        throw ContainerError(0, "bad magic");
    r.seek(4);
    auto version = r.read<std::uint32_t>("version");
    if (version != kContainerVersion)
        throw ContainerError(4, "unsupported version " + std::to_string(version));
    auto tensor_count = r.read<std::uint64_t>("tensor count");
    auto kv_count = r.read<std::uint64_t>("metadata kv count");

    Model model;
    for (std::uint64_t i = 0; i < kv_count; ++i) {
        std::string key = r.read_string("metadata key");
        model.metadata.emplace_back(key, detail::read_metadata_value(r, key));
    }

    struct PendingInfo {
        Tensor tensor;
        std::uint64_t offset;
    };
    std::vector<PendingInfo> infos;
    for (std::uint64_t i = 0; i < tensor_count; ++i) {
        PendingInfo info;
        const std::size_t name_at = r.pos();
        info.tensor.name = r.read_string("tensor name");
        if (info.tensor.name.empty() || info.tensor.name.size() > kMaxTensorNameBytes)
            throw ContainerError(name_at, "bad tensor name length");
        for (const auto& prev : infos)
            if (prev.tensor.name == info.tensor.name)
                throw ContainerError(name_at, "duplicate tensor name '" + info.tensor.name + "'");
        const std::size_t dims_at = r.pos();
        auto n_dims = r.read<std::uint32_t>("n_dims");
        if (n_dims > 4)
            throw ContainerError(dims_at, "n_dims " + std::to_string(n_dims) + " exceeds 4");
        for (std::uint32_t d = 0; d < n_dims; ++d)
            info.tensor.dims.push_back(r.read<std::uint64_t>("dim"));
        const std::size_t dtype_at = r.pos();
        auto dtype = r.read<std::uint32_t>("dtype");
        if (dtype != static_cast<std::uint32_t>(TensorDtype::f32) &&
            dtype != static_cast<std::uint32_t>(TensorDtype::q4b32))
            throw ContainerError(dtype_at, "unknown dtype " + std::to_string(dtype) +
                                               " for tensor '" + info.tensor.name + "'");
        info.tensor.dtype = static_cast<TensorDtype>(dtype);
        if (info.tensor.dtype == TensorDtype::q4b32 &&
            info.tensor.element_count() % kQuantBlockSize != 0)
            throw ContainerError(dtype_at,
                                 "Q4B32 tensor '" + info.tensor.name + "' not block-aligned");
        const std::size_t offset_at = r.pos();
        info.offset = r.read<std::uint64_t>("tensor offset");
        if (info.offset % kContainerAlignment != 0)
            throw ContainerError(offset_at, "misaligned offset for tensor '" +
                                                info.tensor.name + "'");
        infos.push_back(std::move(info));
    }

    std::size_t data_start = (r.pos() + kContainerAlignment - 1) / kContainerAlignment *
                             kContainerAlignment;
    if (!infos.empty() && data_start > bytes.size())
        throw ContainerError(r.pos(), "truncated before data region");

    for (auto& info : infos) {
        if (info.offset > bytes.size() || data_start + info.offset > bytes.size())
            throw ContainerError(bytes.size(), "truncated payload for tensor '" +
                                                   info.tensor.name + "'");
        r.seek(data_start + static_cast<std::size_t>(info.offset));
        auto payload = r.read_bytes(
            static_cast<std::size_t>(info.tensor.expected_payload_bytes()),
            "tensor '" + info.tensor.name + "'");
        info.tensor.payload.assign(payload.begin(), payload.end());
        model.tensors.push_back(std::move(info.tensor));
    }
    return model;
}

// ── validation report ───────────────────────────────────────────────────────

struct ValidationCheck {
    std::string name;
    bool passed;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

inline ValidationReport validate_container(std::span<const std::uint8_t> bytes) {
    ValidationReport report;
    auto add = [&](std::string name, bool ok, std::string detail = "") {
        report.checks.push_back({std::move(name), ok, std::move(detail)});
    };
    Model model;
    try {
        model = read_container(bytes);
        add("parse", true);
    } catch (const ContainerError& e) {
        add("parse", false, e.what());
        return report;
    }
    add("round-trip", write_container(model) ==
                          std::vector<std::uint8_t>(bytes.begin(), bytes.end()),
        "write(read(bytes)) byte-identity");
    std::uint64_t payload_bytes = 0;
    for (const auto& t : model.tensors) payload_bytes += t.payload.size();
    add("tensor payloads", true,
        std::to_string(model.tensors.size()) + " tensors, " +
            std::to_string(payload_bytes) + " payload bytes");
    add("metadata", true, std::to_string(model.metadata.size()) + " keys");
    return report;
}

// ── file helpers ────────────────────────────────────────────────────────────

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

inline void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("short write to " + path);
}

// F32 payload helpers (doubles are the in-memory representation).
inline Tensor make_f32_tensor(std::string name, std::vector<std::uint64_t> dims,
                              std::span<const double> data) {
    Tensor t;
    t.name = std::move(name);
    t.dims = std::move(dims);
    t.dtype = TensorDtype::f32;
    t.payload.reserve(data.size() * 4);
    for (double x : data) put_le(t.payload, static_cast<float>(x));
    return t;
}

inline std::vector<double> f32_tensor_values(const Tensor& t) {
    if (t.dtype != TensorDtype::f32)
        throw std::invalid_argument("tensor '" + t.name + "' is not F32");
    std::vector<double> out(t.element_count());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<double>(get_le<float>(t.payload, 4 * i));
    return out;
}

inline Tensor make_q4b32_tensor(std::string name, const QuantTensor& qt) {
    Tensor t;
    t.name = std::move(name);
    t.dims = qt.shape;
    t.dtype = TensorDtype::q4b32;
    t.payload.reserve(qt.blocks.size() * kQuantBlockBytes);
    for (const auto& block : qt.blocks) pack_block(block, t.payload);
    return t;
}

inline std::vector<double> tensor_values(const Tensor& t) {
    if (t.dtype == TensorDtype::f32) return f32_tensor_values(t);
    QuantTensor qt;
    qt.shape = t.dims;
    for (std::size_t off = 0; off + kQuantBlockBytes <= t.payload.size();
         off += kQuantBlockBytes)
        qt.blocks.push_back(unpack_block(std::span(t.payload).subspan(off, kQuantBlockBytes)));
    return dequantize_tensor(qt);
}

}  // namespace litevla
