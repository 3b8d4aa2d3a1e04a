// SPDX-License-Identifier: Apache-2.0
//
// Container packaging for policies and demonstration datasets. A policy file
// is self-describing: vocabulary, decode limits and model dimensions travel as
// metadata next to the weight tensors.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "litevla/container.hpp"
#include "litevla/policy.hpp"

namespace litevla {

namespace meta_keys {
inline constexpr const char* v_bins = "litevla.vocab.v_bins";
inline constexpr const char* w_bins = "litevla.vocab.w_bins";
inline constexpr const char* v_range_min = "litevla.vocab.v_range.min";
inline constexpr const char* v_range_max = "litevla.vocab.v_range.max";
inline constexpr const char* w_range_min = "litevla.vocab.w_range.min";
inline constexpr const char* w_range_max = "litevla.vocab.w_range.max";
inline constexpr const char* max_tokens = "litevla.decode.max_tokens";
inline constexpr const char* n_ctx = "litevla.backend.n_ctx";
inline constexpr const char* layers = "litevla.backend.layers";
inline constexpr const char* image_h = "litevla.model.image_h";
inline constexpr const char* image_w = "litevla.model.image_w";
inline constexpr const char* d_g = "litevla.model.d_g";
inline constexpr const char* d_tok = "litevla.model.d_tok";
inline constexpr const char* d_h = "litevla.model.d_h";
inline constexpr const char* num_goals = "litevla.model.num_goals";
inline constexpr const char* quantized = "litevla.model.quantized";
inline constexpr const char* dataset_samples = "litevla.dataset.samples";
}  // namespace meta_keys

namespace detail {

template <typename T>
inline T require_meta(const Model& model, const char* key) {
    const MetadataValue* v = model.find(key);
    if (!v) throw std::runtime_error(std::string("missing metadata key ") + key);
    const T* typed = std::get_if<T>(v);
    if (!typed) throw std::runtime_error(std::string("wrong type for metadata key ") + key);
    return *typed;
}

inline const Tensor& require_tensor(const Model& model, const char* name) {
    const Tensor* t = model.find_tensor(name);
    if (!t) throw std::runtime_error(std::string("missing tensor ") + name);
    return *t;
}

inline void put_vocab_metadata(Model& model, const ActionVocabulary& vocab) {
    model.metadata.emplace_back(meta_keys::v_bins, vocab.v_bin_count);
    model.metadata.emplace_back(meta_keys::w_bins, vocab.w_bin_count);
    model.metadata.emplace_back(meta_keys::v_range_min, static_cast<float>(vocab.v_min));
    model.metadata.emplace_back(meta_keys::v_range_max, static_cast<float>(vocab.v_max));
    model.metadata.emplace_back(meta_keys::w_range_min, static_cast<float>(vocab.w_min));
    model.metadata.emplace_back(meta_keys::w_range_max, static_cast<float>(vocab.w_max));
}

inline ActionVocabulary read_vocab_metadata(const Model& model) {
    return ActionVocabulary(
        require_meta<std::uint32_t>(model, meta_keys::v_bins),
        require_meta<std::uint32_t>(model, meta_keys::w_bins),
        require_meta<float>(model, meta_keys::v_range_min),
        require_meta<float>(model, meta_keys::v_range_max),
        require_meta<float>(model, meta_keys::w_range_min),
        require_meta<float>(model, meta_keys::w_range_max));
}

}  // namespace detail

/// Packs a policy into a container model. With `quantize_weights` the W1/W2
/// matrices are stored as Q4B32 blocks; everything else stays F32.
inline Model policy_to_model(const PolicyParams& p, bool quantize_weights) {
    Model m;
    detail::put_vocab_metadata(m, p.vocab);
    m.metadata.emplace_back(meta_keys::max_tokens, std::uint32_t{12});
    m.metadata.emplace_back(meta_keys::n_ctx, std::uint32_t{512});
    m.metadata.emplace_back(meta_keys::layers, std::uint32_t{42});
    m.metadata.emplace_back(meta_keys::image_h, p.dims.image_h);
    m.metadata.emplace_back(meta_keys::image_w, p.dims.image_w);
    m.metadata.emplace_back(meta_keys::d_g, p.dims.d_g);
    m.metadata.emplace_back(meta_keys::d_tok, p.dims.d_tok);
    m.metadata.emplace_back(meta_keys::d_h, p.dims.d_h);
    m.metadata.emplace_back(meta_keys::num_goals, p.dims.num_goals);
    m.metadata.emplace_back(meta_keys::quantized, quantize_weights);

    const std::uint32_t vs = p.vocab_size();
    auto weight = [&](const char* name, const std::vector<double>& data,
                      std::vector<std::uint64_t> dims) {
        if (quantize_weights)
            m.tensors.push_back(make_q4b32_tensor(name, quantize_tensor(data, std::move(dims))));
        else
            m.tensors.push_back(make_f32_tensor(name, std::move(dims), data));
    };
    weight("W1", p.W1, {p.dims.input_dim(), p.dims.d_h});
    weight("W2", p.W2, {p.dims.d_h, vs});
    m.tensors.push_back(make_f32_tensor("b1", {p.dims.d_h}, p.b1));
    m.tensors.push_back(make_f32_tensor("b2", {vs}, p.b2));
    m.tensors.push_back(make_f32_tensor("goal_embedding", {p.dims.num_goals, p.dims.d_g},
                                        p.goal_embedding));
    m.tensors.push_back(make_f32_tensor("prev_token_embedding", {vs + 1, p.dims.d_tok},
                                        p.prev_token_embedding));
    return m;
}

inline PolicyParams model_to_policy(const Model& m) {
    PolicyParams p;
    p.vocab = detail::read_vocab_metadata(m);
    p.dims.image_h = detail::require_meta<std::uint32_t>(m, meta_keys::image_h);
    p.dims.image_w = detail::require_meta<std::uint32_t>(m, meta_keys::image_w);
    p.dims.d_g = detail::require_meta<std::uint32_t>(m, meta_keys::d_g);
    p.dims.d_tok = detail::require_meta<std::uint32_t>(m, meta_keys::d_tok);
    p.dims.d_h = detail::require_meta<std::uint32_t>(m, meta_keys::d_h);
    p.dims.num_goals = detail::require_meta<std::uint32_t>(m, meta_keys::num_goals);

    p.W1 = tensor_values(detail::require_tensor(m, "W1"));
    p.W2 = tensor_values(detail::require_tensor(m, "W2"));
    p.b1 = tensor_values(detail::require_tensor(m, "b1"));
    p.b2 = tensor_values(detail::require_tensor(m, "b2"));
    p.goal_embedding = tensor_values(detail::require_tensor(m, "goal_embedding"));
    p.prev_token_embedding = tensor_values(detail::require_tensor(m, "prev_token_embedding"));

    const std::size_t vs = p.vocab_size();
    if (p.W1.size() != static_cast<std::size_t>(p.dims.input_dim()) * p.dims.d_h ||
        p.W2.size() != static_cast<std::size_t>(p.dims.d_h) * vs ||
        p.b1.size() != p.dims.d_h || p.b2.size() != vs ||
        p.prev_token_embedding.size() != (vs + 1) * p.dims.d_tok)
        throw std::runtime_error("policy container: tensor sizes inconsistent with metadata");
    p.freeze();
    return p;
}

inline void save_policy(const PolicyParams& p, const std::string& path,
                        bool quantize_weights = false) {
    auto bytes = write_container(policy_to_model(p, quantize_weights));
    write_file_bytes(path, bytes);
}

inline PolicyParams load_policy(const std::string& path) {
    return model_to_policy(read_container(read_file_bytes(path)));
}

// ── demonstration datasets ──────────────────────────────────────────────────

inline Model dataset_to_model(const std::vector<TrainSample>& dataset,
                              const ActionVocabulary& vocab) {
    if (dataset.empty()) throw std::invalid_argument("dataset_to_model: empty dataset");
    const auto& first = dataset.front().first;
    const std::uint64_t n = dataset.size();
    const std::uint64_t pixels = first.image.size();

    std::vector<double> images, goals, tokens;
    images.reserve(n * pixels);
    for (const auto& [obs, seq] : dataset) {
        if (obs.image.size() != pixels)
            throw std::invalid_argument("dataset_to_model: inconsistent image sizes");
        if (seq.tokens.size() != 2)
            throw std::invalid_argument("dataset_to_model: target must be a token pair");
        images.insert(images.end(), obs.image.begin(), obs.image.end());
        goals.push_back(obs.goal.goal_id);
        tokens.push_back(seq.tokens[0]);
        tokens.push_back(seq.tokens[1]);
    }

    Model m;
    detail::put_vocab_metadata(m, vocab);
    m.metadata.emplace_back(meta_keys::dataset_samples, n);
    m.metadata.emplace_back(meta_keys::image_h, first.height);
    m.metadata.emplace_back(meta_keys::image_w, first.width);
    m.tensors.push_back(
        make_f32_tensor("images", {n, first.height, first.width, 3}, images));
    m.tensors.push_back(make_f32_tensor("goal_ids", {n}, goals));
    m.tensors.push_back(make_f32_tensor("tokens", {n, 2}, tokens));
    return m;
}

inline std::vector<TrainSample> model_to_dataset(const Model& m, ActionVocabulary* vocab_out) {
    const auto n = detail::require_meta<std::uint64_t>(m, meta_keys::dataset_samples);
    const auto h = detail::require_meta<std::uint32_t>(m, meta_keys::image_h);
    const auto w = detail::require_meta<std::uint32_t>(m, meta_keys::image_w);
    if (vocab_out) *vocab_out = detail::read_vocab_metadata(m);

    const auto images = f32_tensor_values(detail::require_tensor(m, "images"));
    const auto goals = f32_tensor_values(detail::require_tensor(m, "goal_ids"));
    const auto tokens = f32_tensor_values(detail::require_tensor(m, "tokens"));
    const std::size_t pixels = static_cast<std::size_t>(h) * w * 3;
    if (images.size() != n * pixels || goals.size() != n || tokens.size() != 2 * n)
        throw std::runtime_error("dataset container: tensor sizes inconsistent");

    std::vector<TrainSample> dataset(n);
    for (std::size_t i = 0; i < n; ++i) {
        Observation& obs = dataset[i].first;
        obs.height = h;
        obs.width = w;
        obs.image.assign(images.begin() + static_cast<std::ptrdiff_t>(i * pixels),
                         images.begin() + static_cast<std::ptrdiff_t>((i + 1) * pixels));
        obs.goal.goal_id = static_cast<std::uint32_t>(goals[i]);
        dataset[i].second.tokens = {static_cast<std::uint32_t>(tokens[2 * i]),
                                    static_cast<std::uint32_t>(tokens[2 * i + 1])};
    }
    return dataset;
}

}  // namespace litevla
