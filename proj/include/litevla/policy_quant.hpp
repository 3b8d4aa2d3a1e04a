// SPDX-License-Identifier: Apache-2.0
//
// Post-training 4-bit compression of a policy and FP-vs-quantized agreement
// analysis. Weight matrices pass through quantize->dequantize; biases stay in
// full precision. Tensors whose element count is not a multiple of the block
// size cannot use the pad-free codec and are kept in full precision, which the
// summary records.

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "litevla/policy.hpp"
#include "litevla/quantizer.hpp"

namespace litevla {

struct TensorQuantSummary {
    std::string name;
    std::uint64_t elements = 0;
    bool quantized = false;
    double max_abs_error = 0.0;
};

struct QuantizePolicyResult {
    PolicyParams params;
    std::vector<TensorQuantSummary> summary;
};

inline QuantizePolicyResult quantize_policy(const PolicyParams& input) {
    QuantizePolicyResult result;
    result.params = input;
    auto process = [&](const char* name, std::vector<double>& data,
                       std::vector<std::uint64_t> shape) {
        TensorQuantSummary s;
        s.name = name;
        s.elements = data.size();
        if (data.size() % kQuantBlockSize == 0 && !data.empty()) {
            auto qt = quantize_tensor(data, std::move(shape));
            auto restored = dequantize_tensor(qt);
            for (std::size_t i = 0; i < data.size(); ++i)
                s.max_abs_error = std::max(s.max_abs_error, std::abs(data[i] - restored[i]));
            data = std::move(restored);
            s.quantized = true;
        }
        result.summary.push_back(std::move(s));
    };
    const auto& d = input.dims;
    process("W1", result.params.W1, {d.input_dim(), d.d_h});
    process("W2", result.params.W2, {d.d_h, input.vocab_size()});
    process("goal_embedding", result.params.goal_embedding, {d.num_goals, d.d_g});
    process("prev_token_embedding", result.params.prev_token_embedding,
            {input.vocab_size() + 1, d.d_tok});
    result.params.freeze();
    return result;
}

struct AgreementReport {
    double agreement = 0.0;  // fraction in [0, 1]
    std::size_t total = 0;
    std::vector<std::size_t> disagreeing;  // observation indices
};

/// Fraction of observations on which the two policies greedy-decode identical
/// token sequences.
inline AgreementReport argmax_agreement(const PolicyParams& params_fp,
                                        const PolicyParams& params_q,
                                        const std::vector<Observation>& observations,
                                        const DecodeConfig& config = {}) {
    AgreementReport report;
    report.total = observations.size();
    std::size_t matches = 0;
    for (std::size_t i = 0; i < observations.size(); ++i) {
        if (greedy_decode(params_fp, observations[i], config) ==
            greedy_decode(params_q, observations[i], config))
            ++matches;
        else
            report.disagreeing.push_back(i);
    }
    report.agreement = observations.empty()
                           ? 1.0
                           : static_cast<double>(matches) /
                                 static_cast<double>(observations.size());
    return report;
}

}  // namespace litevla
