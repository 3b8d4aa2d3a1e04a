// SPDX-License-Identifier: Apache-2.0
//
// Toy autoregressive image-and-language-conditioned policy.
//
// The backbone is a 2-layer tanh MLP over the concatenated feature vector
// [flattened image | goal embedding | previous-token embedding]. Output is a
// softmax over the joint action vocabulary [v-tokens | omega-tokens]. A LoRA
// adapter may be attached to W1; its effective contribution is (alpha/rank)
// times B*A and the base weights are frozen while it is attached.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "litevla/action_space.hpp"

namespace litevla {

struct GoalInstruction {
    std::string text;
    std::uint32_t goal_id = 0;
};

struct Observation {
    std::vector<double> image;  // H*W*3 row-major, index (row*W + col)*3 + channel
    std::uint32_t height = 16;
    std::uint32_t width = 16;
    GoalInstruction goal;
};

struct LoraAdapter {
    std::uint32_t rank = 8;
    double alpha = 8.0;
    std::uint32_t d_in = 0, d_out = 0;
    std::vector<double> A;  // [rank x d_in], row-major
    std::vector<double> B;  // [d_out x rank], row-major; zero at creation

    double scaling() const { return alpha / static_cast<double>(rank); }
};

struct PolicyDims {
    std::uint32_t image_h = 16, image_w = 16;
    std::uint32_t d_g = 8;    // goal embedding width
    std::uint32_t d_tok = 8;  // previous-token embedding width
    std::uint32_t d_h = 32;   // hidden width
    std::uint32_t num_goals = 3;

    std::uint32_t image_dim() const { return image_h * image_w * 3; }
    std::uint32_t input_dim() const { return image_dim() + d_g + d_tok; }
};

struct PolicyParams {
    PolicyDims dims;
    ActionVocabulary vocab;
    std::vector<double> goal_embedding;       // [num_goals x d_g]
    std::vector<double> W1;                   // [input_dim x d_h]
    std::vector<double> b1;                   // [d_h]
    std::vector<double> W2;                   // [d_h x vocab_size]
    std::vector<double> b2;                   // [vocab_size]
    std::vector<double> prev_token_embedding; // [(vocab_size+1) x d_tok], row 0 = BOS
    std::optional<LoraAdapter> lora;
    bool frozen = false;

    std::uint32_t vocab_size() const { return vocab.token_space_size(); }
    void freeze() { frozen = true; }
};

struct DecodeConfig {
    double temperature = 0.0;          // only deterministic decoding exists
    std::uint32_t max_tokens = 12;
    std::uint32_t context_budget = 512;  // metadata only

    DecodeConfig() = default;
    DecodeConfig(double temp, std::uint32_t max_tok, std::uint32_t ctx)
        : temperature(temp), max_tokens(max_tok), context_budget(ctx) {
        if (temperature != 0.0)
            throw std::invalid_argument("DecodeConfig: only temperature 0.0 is supported");
        if (max_tokens == 0)
            throw std::invalid_argument("DecodeConfig: max_tokens must be positive");
    }
};

// Global model-vocabulary id of a bin index at a given sequence position.
inline std::uint32_t global_token_id(const ActionVocabulary& vocab, std::size_t position,
                                     std::uint32_t bin) {
    return position % 2 == 0 ? bin : vocab.v_bin_count + bin;
}

namespace detail {

// Portable deterministic uniform in [-scale, scale).
inline double symmetric_uniform(std::mt19937_64& rng, double scale) {
    const double u = static_cast<double>(rng() >> 11) * 0x1p-53;  // [0, 1)
    return (2.0 * u - 1.0) * scale;
}

}  // namespace detail

inline PolicyParams init_policy(const PolicyDims& dims, const ActionVocabulary& vocab,
                                std::uint64_t seed, double init_scale = 0.08) {
    PolicyParams p;
    p.dims = dims;
    p.vocab = vocab;
    std::mt19937_64 rng(seed);
    auto fill = [&](std::vector<double>& v, std::size_t n) {
        v.resize(n);
        for (auto& x : v) x = detail::symmetric_uniform(rng, init_scale);
    };
    const std::uint32_t vs = vocab.token_space_size();
    fill(p.goal_embedding, static_cast<std::size_t>(dims.num_goals) * dims.d_g);
    fill(p.W1, static_cast<std::size_t>(dims.input_dim()) * dims.d_h);
    p.b1.assign(dims.d_h, 0.0);
    fill(p.W2, static_cast<std::size_t>(dims.d_h) * vs);
    p.b2.assign(vs, 0.0);
    fill(p.prev_token_embedding, static_cast<std::size_t>(vs + 1) * dims.d_tok);
    return p;
}

inline LoraAdapter make_lora(std::uint32_t d_in, std::uint32_t d_out, std::uint32_t rank,
                             double alpha, std::uint64_t seed) {
    if (rank == 0 || alpha <= 0.0)
        throw std::invalid_argument("make_lora: rank and alpha must be positive");
    LoraAdapter a;
    a.rank = rank;
    a.alpha = alpha;
    a.d_in = d_in;
    a.d_out = d_out;
    std::mt19937_64 rng(seed);
    a.A.resize(static_cast<std::size_t>(rank) * d_in);
    for (auto& x : a.A) x = detail::symmetric_uniform(rng, 0.05);
    a.B.assign(static_cast<std::size_t>(d_out) * rank, 0.0);  // zero init
    return a;
}

// ── forward pass ────────────────────────────────────────────────────────────

namespace detail {

struct ForwardCache {
    std::vector<double> input;    // [input_dim]
    std::vector<double> hidden;   // [d_h], post-tanh
    std::vector<double> probs;    // [vocab_size]
    std::uint32_t prev_row = 0;   // prev-token embedding row used
};

// W1 with the LoRA delta applied: W1_eff[i][j] = W1[i][j] + s * sum_k B[j][k]*A[k][i].
inline std::vector<double> effective_w1(const PolicyParams& p) {
    if (!p.lora) return p.W1;
    const auto& a = *p.lora;
    const std::uint32_t d_in = p.dims.input_dim(), d_h = p.dims.d_h;
    if (a.d_in != d_in || a.d_out != d_h)
        throw std::invalid_argument("LoRA adapter dimensions do not match W1");
    const double s = a.scaling();
    std::vector<double> w = p.W1;
    for (std::uint32_t j = 0; j < d_h; ++j)
        for (std::uint32_t k = 0; k < a.rank; ++k) {
            const double bs = s * a.B[static_cast<std::size_t>(j) * a.rank + k];
            if (bs == 0.0) continue;
            const double* arow = a.A.data() + static_cast<std::size_t>(k) * d_in;
            for (std::uint32_t i = 0; i < d_in; ++i)
                w[static_cast<std::size_t>(i) * d_h + j] += bs * arow[i];
        }
    return w;
}

inline ForwardCache forward_cached(const PolicyParams& p, const std::vector<double>& w1,
                                   const Observation& obs, const ActionTokenSeq& prefix) {
    const auto& d = p.dims;
    if (obs.height != d.image_h || obs.width != d.image_w ||
        obs.image.size() != d.image_dim())
        throw std::invalid_argument("forward: observation dimensions mismatch");
    if (obs.goal.goal_id >= d.num_goals)
        throw std::invalid_argument("forward: goal_id out of range");

    ForwardCache c;
    c.input.reserve(d.input_dim());
    c.input.insert(c.input.end(), obs.image.begin(), obs.image.end());
    const double* grow = p.goal_embedding.data() +
                         static_cast<std::size_t>(obs.goal.goal_id) * d.d_g;
    c.input.insert(c.input.end(), grow, grow + d.d_g);
    c.prev_row = prefix.tokens.empty()
                     ? 0u
                     : 1u + global_token_id(p.vocab, prefix.tokens.size() - 1,
                                            prefix.tokens.back());
    if (c.prev_row > p.vocab_size())
        throw std::invalid_argument("forward: prefix token out of vocabulary");
    const double* trow = p.prev_token_embedding.data() +
                         static_cast<std::size_t>(c.prev_row) * d.d_tok;
    c.input.insert(c.input.end(), trow, trow + d.d_tok);

    const std::uint32_t d_h = d.d_h, vs = p.vocab_size(), d_in = d.input_dim();
    c.hidden.assign(d_h, 0.0);
    for (std::uint32_t i = 0; i < d_in; ++i) {
        const double xi = c.input[i];
        if (xi == 0.0) continue;
        const double* wrow = w1.data() + static_cast<std::size_t>(i) * d_h;
        for (std::uint32_t j = 0; j < d_h; ++j) c.hidden[j] += xi * wrow[j];
    }
    for (std::uint32_t j = 0; j < d_h; ++j) c.hidden[j] = std::tanh(c.hidden[j] + p.b1[j]);

    std::vector<double> logits(p.b2);
    for (std::uint32_t j = 0; j < d_h; ++j) {
        const double hj = c.hidden[j];
        const double* wrow = p.W2.data() + static_cast<std::size_t>(j) * vs;
        for (std::uint32_t v = 0; v < vs; ++v) logits[v] += hj * wrow[v];
    }
    const double peak = *std::max_element(logits.begin(), logits.end());
    c.probs.resize(vs);
    double z = 0.0;
    for (std::uint32_t v = 0; v < vs; ++v) {
        c.probs[v] = std::exp(logits[v] - peak);
        z += c.probs[v];
    }
    for (auto& q : c.probs) q /= z;
    return c;
}

}  // namespace detail

/// Next-token distribution over the joint vocabulary given an observation and
/// a (possibly empty) token prefix.
inline std::vector<double> forward(const PolicyParams& params, const Observation& obs,
                                   const ActionTokenSeq& prefix = {}) {
    return detail::forward_cached(params, detail::effective_w1(params), obs, prefix).probs;
}

// ── loss and gradients ──────────────────────────────────────────────────────

using TrainSample = std::pair<Observation, ActionTokenSeq>;

inline double nll_loss(const PolicyParams& params, const std::vector<TrainSample>& batch) {
    if (batch.empty()) throw std::invalid_argument("nll_loss: empty batch");
    const auto w1 = detail::effective_w1(params);
    double total = 0.0;
    for (const auto& [obs, target] : batch) {
        ActionTokenSeq prefix;
        for (std::size_t i = 0; i < target.tokens.size(); ++i) {
            auto c = detail::forward_cached(params, w1, obs, prefix);
            const std::uint32_t gid = global_token_id(params.vocab, i, target.tokens[i]);
            if (gid >= c.probs.size())
                throw std::invalid_argument("nll_loss: target token out of vocabulary");
            const double q = c.probs[gid];
            if (q <= 0.0) return std::numeric_limits<double>::infinity();
            total -= std::log(q);
            prefix.tokens.push_back(target.tokens[i]);
        }
    }
    return total / static_cast<double>(batch.size());
}

/// Gradient structure congruent to the trainable fields of PolicyParams.
/// When a LoRA adapter is attached the base W1 and W2 gradients are zero.
struct PolicyGrad {
    std::vector<double> goal_embedding, W1, b1, W2, b2, prev_token_embedding;
    std::vector<double> lora_A, lora_B;
};

inline PolicyGrad grad_nll(const PolicyParams& p, const std::vector<TrainSample>& batch) {
    if (batch.empty()) throw std::invalid_argument("grad_nll: empty batch");
    const auto& d = p.dims;
    const std::uint32_t d_in = d.input_dim(), d_h = d.d_h, vs = p.vocab_size();
    const auto w1 = detail::effective_w1(p);

    PolicyGrad g;
    g.goal_embedding.assign(p.goal_embedding.size(), 0.0);
    g.W1.assign(p.W1.size(), 0.0);
    g.b1.assign(p.b1.size(), 0.0);
    g.W2.assign(p.W2.size(), 0.0);
    g.b2.assign(p.b2.size(), 0.0);
    g.prev_token_embedding.assign(p.prev_token_embedding.size(), 0.0);
    if (p.lora) {
        g.lora_A.assign(p.lora->A.size(), 0.0);
        g.lora_B.assign(p.lora->B.size(), 0.0);
    }

    // gradient wrt the effective W1; projected onto A/B (or the base) at the end
    std::vector<double> g_w1_eff(p.W1.size(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(batch.size());

    for (const auto& [obs, target] : batch) {
        ActionTokenSeq prefix;
        for (std::size_t step = 0; step < target.tokens.size(); ++step) {
            auto c = detail::forward_cached(p, w1, obs, prefix);
            const std::uint32_t gid = global_token_id(p.vocab, step, target.tokens[step]);

            std::vector<double> dlogits = c.probs;  // softmax-CE gradient
            dlogits[gid] -= 1.0;
            for (auto& x : dlogits) x *= inv_n;

            std::vector<double> dh(d_h, 0.0);
            for (std::uint32_t j = 0; j < d_h; ++j) {
                const double hj = c.hidden[j];
                double acc = 0.0;
                const double* wrow = p.W2.data() + static_cast<std::size_t>(j) * vs;
                double* gwrow = g.W2.data() + static_cast<std::size_t>(j) * vs;
                for (std::uint32_t v = 0; v < vs; ++v) {
                    gwrow[v] += hj * dlogits[v];
                    acc += wrow[v] * dlogits[v];
                }
                dh[j] = acc * (1.0 - hj * hj);  // tanh'
            }
            for (std::uint32_t v = 0; v < vs; ++v) g.b2[v] += dlogits[v];
            for (std::uint32_t j = 0; j < d_h; ++j) g.b1[j] += dh[j];

            for (std::uint32_t i = 0; i < d_in; ++i) {
                const double xi = c.input[i];
                if (xi == 0.0) continue;
                double* grow = g_w1_eff.data() + static_cast<std::size_t>(i) * d_h;
                for (std::uint32_t j = 0; j < d_h; ++j) grow[j] += xi * dh[j];
            }

            // input gradient is only needed for the embedding slices
            auto input_grad = [&](std::uint32_t i) {
                const double* wrow = w1.data() + static_cast<std::size_t>(i) * d_h;
                double acc = 0.0;
                for (std::uint32_t j = 0; j < d_h; ++j) acc += wrow[j] * dh[j];
                return acc;
            };
            const std::uint32_t goal_base = d.image_dim();
            double* gerow = g.goal_embedding.data() +
                            static_cast<std::size_t>(obs.goal.goal_id) * d.d_g;
            for (std::uint32_t k = 0; k < d.d_g; ++k) gerow[k] += input_grad(goal_base + k);
            const std::uint32_t tok_base = goal_base + d.d_g;
            double* gtrow = g.prev_token_embedding.data() +
                            static_cast<std::size_t>(c.prev_row) * d.d_tok;
            for (std::uint32_t k = 0; k < d.d_tok; ++k) gtrow[k] += input_grad(tok_base + k);

            prefix.tokens.push_back(target.tokens[step]);
        }
    }

    if (!p.lora) {
        g.W1 = std::move(g_w1_eff);
    } else {
        const auto& a = *p.lora;
        const double s = a.scaling();
        // dA[k][i] = s * sum_j B[j][k] * dW1eff[i][j]; dB[j][k] = s * sum_i A[k][i] * dW1eff[i][j]
        for (std::uint32_t k = 0; k < a.rank; ++k) {
            const double* arow = a.A.data() + static_cast<std::size_t>(k) * d_in;
            double* garow = g.lora_A.data() + static_cast<std::size_t>(k) * d_in;
            for (std::uint32_t i = 0; i < d_in; ++i) {
                const double* grow = g_w1_eff.data() + static_cast<std::size_t>(i) * d_h;
                double da = 0.0;
                for (std::uint32_t j = 0; j < d_h; ++j) {
                    const double gw = grow[j];
                    da += a.B[static_cast<std::size_t>(j) * a.rank + k] * gw;
                    g.lora_B[static_cast<std::size_t>(j) * a.rank + k] += s * arow[i] * gw;
                }
                garow[i] = s * da;
            }
        }
    }
    return g;
}

// ── training ────────────────────────────────────────────────────────────────

struct TrainConfig {
    double learning_rate = 0.05;
    std::uint32_t epochs = 400;
    std::uint32_t batch_size = 32;
    std::uint64_t seed = 0;
};

struct TrainResult {
    PolicyParams params;
    std::vector<double> epoch_loss;  // mean training loss per epoch
    double initial_loss = 0.0;
    double final_loss = 0.0;
};

/// Plain SGD with seed-deterministic shuffling. When a LoRA adapter is
/// attached only A, B, biases and embeddings are updated.
inline TrainResult train_sft(PolicyParams params, const std::vector<TrainSample>& dataset,
                             const TrainConfig& config) {
    if (dataset.empty()) throw std::invalid_argument("train_sft: empty dataset");
    if (params.frozen) throw std::invalid_argument("train_sft: params are frozen");

    TrainResult result;
    result.initial_loss = nll_loss(params, dataset);

    std::vector<std::size_t> order(dataset.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(config.seed);

    auto apply = [&](std::vector<double>& param, const std::vector<double>& grad) {
        for (std::size_t i = 0; i < param.size(); ++i)
            param[i] -= config.learning_rate * grad[i];
    };

    for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
        // Fisher-Yates with the portable generator; std::shuffle is not
        // guaranteed identical across standard libraries
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng() % i]);

        double epoch_total = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            std::vector<TrainSample> batch;
            for (std::size_t i = start; i < std::min(order.size(), start + config.batch_size);
                 ++i)
                batch.push_back(dataset[order[i]]);
            const double loss = nll_loss(params, batch);
            if (!std::isfinite(loss))
                throw std::runtime_error("train_sft: non-finite loss at epoch " +
                                         std::to_string(epoch));
            epoch_total += loss;
            ++batches;
            PolicyGrad g = grad_nll(params, batch);
            apply(params.b1, g.b1);
            apply(params.b2, g.b2);
            apply(params.goal_embedding, g.goal_embedding);
            apply(params.prev_token_embedding, g.prev_token_embedding);
            if (params.lora) {
                apply(params.lora->A, g.lora_A);
                apply(params.lora->B, g.lora_B);
            } else {
                apply(params.W1, g.W1);
                apply(params.W2, g.W2);
            }
        }
        result.epoch_loss.push_back(epoch_total / static_cast<double>(batches));
    }

    result.final_loss = nll_loss(params, dataset);
    result.params = std::move(params);
    return result;
}

// ── decoding ────────────────────────────────────────────────────────────────

/// Deterministic greedy (T = 0) decode of one action command: argmax over the
/// v sub-vocabulary, then over the omega sub-vocabulary, ties broken by lowest
/// token id. Stops after 2 tokens or max_tokens, whichever is first.
inline ActionTokenSeq greedy_decode(const PolicyParams& params, const Observation& obs,
                                    const DecodeConfig& config = {}) {
    if (!params.frozen)
        throw std::invalid_argument("greedy_decode: params must be frozen");
    const auto w1 = detail::effective_w1(params);
    ActionTokenSeq seq;
    seq.max_len = config.max_tokens;
    const std::size_t steps = std::min<std::size_t>(2, config.max_tokens);
    for (std::size_t pos = 0; pos < steps; ++pos) {
        auto c = detail::forward_cached(params, w1, obs, seq);
        const std::uint32_t base = pos % 2 == 0 ? 0 : params.vocab.v_bin_count;
        const std::uint32_t count =
            pos % 2 == 0 ? params.vocab.v_bin_count : params.vocab.w_bin_count;
        std::uint32_t best = 0;
        for (std::uint32_t b = 1; b < count; ++b)
            if (c.probs[base + b] > c.probs[base + best]) best = b;
        seq.tokens.push_back(best);
    }
    return seq;
}

}  // namespace litevla
