// SPDX-License-Identifier: Apache-2.0
//
// Dual-format reporting: a human-readable latency table with the canonical
// measurement row labels, and machine-readable JSON for every command.

#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "litevla/policy_quant.hpp"
#include "litevla/sim.hpp"

namespace litevla {

inline std::string format_ms(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f ms", value);
    return buf;
}

/// Human-readable latency table. Row labels are the canonical measurement
/// names: Total Runs, Mean Latency, Std Deviation, Minimum, Maximum,
/// Reasoning Frequency.
inline std::string render_latency_table(const LatencyReport& r) {
    char hz[64];
    std::snprintf(hz, sizeof(hz), "%.2f Hz", r.hz);
    const std::vector<std::pair<std::string, std::string>> rows = {
        {"Total Runs", std::to_string(r.runs)},
        {"Mean Latency", format_ms(r.mean_ms)},
        {"Std Deviation", format_ms(r.std_ms)},
        {"Minimum", format_ms(r.min_ms)},
        {"Maximum", format_ms(r.max_ms)},
        {"Reasoning Frequency", hz},
    };
    std::string out;
    out += "Measurement            Result\n";
    out += "----------------------------------\n";
    for (const auto& [label, value] : rows) {
        out += label;
        out.append(label.size() < 22 ? 22 - label.size() : 1, ' ');
        out += value;
        out += "\n";
    }
    if (r.warmup_excluded > 0)
        out += "(" + std::to_string(r.warmup_excluded) + " warm-up runs excluded)\n";
    return out;
}

inline nlohmann::json latency_report_to_json(const LatencyReport& r) {
    return nlohmann::json{{"total_runs", r.runs},
                          {"mean_ms", r.mean_ms},
                          {"std_ms", r.std_ms},
                          {"min_ms", r.min_ms},
                          {"max_ms", r.max_ms},
                          {"hz", r.hz},
                          {"warmup_excluded", r.warmup_excluded},
                          {"degenerate_std", r.degenerate_std}};
}

struct EvalSummary {
    std::uint32_t episodes = 0;
    std::uint32_t successes = 0;
    double mean_steps = 0.0;
    std::uint64_t fail_safe_activations = 0;

    double success_rate() const {
        return episodes == 0 ? 0.0 : static_cast<double>(successes) / episodes;
    }
};

inline EvalSummary summarize_episodes(const std::vector<EpisodeResult>& results) {
    EvalSummary s;
    s.episodes = static_cast<std::uint32_t>(results.size());
    double steps = 0.0;
    for (const auto& r : results) {
        if (r.success) ++s.successes;
        steps += static_cast<double>(r.steps);
        s.fail_safe_activations += r.fail_safe_activations;
    }
    s.mean_steps = results.empty() ? 0.0 : steps / static_cast<double>(results.size());
    return s;
}

inline nlohmann::json eval_summary_to_json(const EvalSummary& s) {
    return nlohmann::json{{"episodes", s.episodes},
                          {"successes", s.successes},
                          {"success_rate", s.success_rate()},
                          {"mean_steps", s.mean_steps},
                          {"fail_safe_activations", s.fail_safe_activations}};
}

inline nlohmann::json agreement_report_to_json(const AgreementReport& r) {
    return nlohmann::json{{"agreement", r.agreement},
                          {"observations", r.total},
                          {"disagreeing_observations", r.disagreeing},
                          {"threshold_note",
                           "agreement and success-delta thresholds are artifact-chosen; "
                           "no reference values exist for them"}};
}

}  // namespace litevla
