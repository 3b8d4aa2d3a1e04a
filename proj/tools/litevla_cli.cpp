// SPDX-License-Identifier: Apache-2.0
//
// litevla — single entry point for the train / quantize / package / decode /
// closed-loop / benchmark pipeline.

#include <atomic>
#include <csignal>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "litevla/config.hpp"
#include "litevla/container.hpp"
#include "litevla/policy.hpp"
#include "litevla/policy_io.hpp"
#include "litevla/policy_quant.hpp"
#include "litevla/process_backend.hpp"
#include "litevla/report.hpp"
#include "litevla/sim.hpp"
#include "litevla/udp_bridge.hpp"

namespace {

using namespace litevla;

std::atomic<bool> g_interrupted{false};

void write_json_report(const std::string& path, const nlohmann::json& body) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report to " + path);
    out << body.dump(2) << "\n";
}

nlohmann::json report_envelope(const RunConfig& cfg, nlohmann::json body) {
    return nlohmann::json{{"config", config_to_json(cfg)},
                          {"seed", cfg.seed},
                          {"result", std::move(body)}};
}

// backend spec: "expert", "delay:<ms>", "toy:<policy.gguf>", "exec:<command>"
std::unique_ptr<ReasoningBackend> make_backend(const std::string& spec,
                                               const ActionVocabulary& vocab) {
    if (spec == "expert") return std::make_unique<ExpertBackend>(vocab);
    if (spec.rfind("delay:", 0) == 0)
        return std::make_unique<DelayInjectingBackend>(std::stod(spec.substr(6)));
    if (spec.rfind("toy:", 0) == 0)
        return std::make_unique<ToyPolicyBackend>(load_policy(spec.substr(4)));
    if (spec.rfind("exec:", 0) == 0)
        return std::make_unique<ExternalProcessBackend>(spec.substr(5), vocab);
    throw std::runtime_error("unknown backend spec '" + spec +
                             "' (expected expert | delay:<ms> | toy:<file> | exec:<cmd>)");
}

int cmd_gen_data(const RunConfig& cfg, const std::string& out_path) {
    auto dataset = collect_dataset(cfg.dataset_episodes, cfg.seed, cfg.vocab, cfg.episode);
    auto bytes = write_container(dataset_to_model(dataset, cfg.vocab));
    write_file_bytes(out_path, bytes);
    std::cout << "wrote " << dataset.size() << " samples (" << cfg.dataset_episodes
              << " episodes) to " << out_path << "\n";
    return 0;
}

int cmd_train(const RunConfig& cfg, const std::string& data_path,
              const std::string& out_path) {
    ActionVocabulary vocab;
    auto dataset = model_to_dataset(read_container(read_file_bytes(data_path)), &vocab);
    PolicyParams params = init_policy(cfg.dims, vocab, cfg.seed);
    TrainResult result = train_sft(std::move(params), dataset, cfg.train);
    std::cout << "epochs " << result.epoch_loss.size() << ", loss " << result.initial_loss
              << " -> " << result.final_loss << "\n";
    if (result.final_loss > result.initial_loss) {
        std::cerr << R"({"error":"training","message":"final loss exceeds initial loss"})"
                  << "\n";
        return 1;
    }
    result.params.freeze();
    save_policy(result.params, out_path, /*quantize_weights=*/false);
    std::cout << "wrote FP32 policy to " << out_path << "\n";
    return 0;
}

int cmd_quantize(const std::string& in_path, const std::string& out_path) {
    PolicyParams fp = load_policy(in_path);
    QuantizePolicyResult q = quantize_policy(fp);
    for (const auto& s : q.summary)
        std::cout << s.name << ": " << s.elements << " elements, "
                  << (s.quantized ? "Q4B32" : "kept F32 (not block-aligned)")
                  << ", max |err| " << s.max_abs_error << "\n";
    save_policy(q.params, out_path, /*quantize_weights=*/true);
    std::cout << "wrote quantized policy to " << out_path << "\n";
    return 0;
}

int cmd_inspect(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    ValidationReport report = validate_container(bytes);
    for (const auto& check : report.checks)
        std::cout << (check.passed ? "[ok]   " : "[FAIL] ") << check.name
                  << (check.detail.empty() ? "" : ": " + check.detail) << "\n";
    if (!report.all_passed()) return 1;

    const Model model = read_container(bytes);
    std::cout << "\nmetadata (" << model.metadata.size() << "):\n";
    for (const auto& [key, value] : model.metadata) {
        std::cout << "  " << key << " = ";
        std::visit([](const auto& v) { std::cout << v; }, value);
        std::cout << "\n";
    }
    std::cout << "tensors (" << model.tensors.size() << "):\n";
    for (const auto& t : model.tensors) {
        std::cout << "  " << t.name << " [";
        for (std::size_t i = 0; i < t.dims.size(); ++i)
            std::cout << (i ? "x" : "") << t.dims[i];
        std::cout << "] " << (t.dtype == TensorDtype::f32 ? "F32" : "Q4B32") << ", "
                  << t.payload.size() << " bytes\n";
    }
    return 0;
}

int cmd_eval_loop(const RunConfig& cfg, const std::string& backend_spec,
                  const std::string& report_path) {
    auto backend = make_backend(backend_spec, cfg.vocab);
    std::vector<EpisodeResult> results;
    for (std::uint32_t i = 0; i < cfg.eval_episodes; ++i)
        results.push_back(run_closed_loop(*backend, cfg.vocab, cfg.episode, cfg.seed + i));
    const EvalSummary summary = summarize_episodes(results);
    std::cout << "episodes " << summary.episodes << ", success rate "
              << summary.success_rate() << ", mean steps " << summary.mean_steps
              << ", fail-safe activations " << summary.fail_safe_activations << "\n";
    write_json_report(report_path, report_envelope(cfg, eval_summary_to_json(summary)));
    return 0;
}

int cmd_bench_latency(const RunConfig& cfg, const std::string& backend_spec,
                      const std::string& report_path) {
    auto backend = make_backend(backend_spec, cfg.vocab);
    LatencyReport report =
        run_latency_bench(*backend, cfg.vocab, cfg.bench_runs, cfg.bench_warmup, cfg.seed);
    std::cout << render_latency_table(report);
    write_json_report(report_path, report_envelope(cfg, latency_report_to_json(report)));
    return 0;
}

int cmd_compare_quant(const RunConfig& cfg, const std::string& fp32_path,
                      const std::string& quant_path, std::uint32_t n_observations,
                      const std::string& report_path) {
    PolicyParams fp = load_policy(fp32_path);
    PolicyParams q = load_policy(quant_path);

    std::vector<Observation> observations;
    observations.reserve(n_observations);
    for (std::uint32_t i = 0; i < n_observations; ++i)
        observations.push_back(render_observation(make_world(cfg.seed + i)));
    const AgreementReport agreement = argmax_agreement(fp, q, observations);

    auto success_rate = [&](PolicyParams params) {
        ToyPolicyBackend backend(std::move(params));
        std::vector<EpisodeResult> results;
        for (std::uint32_t i = 0; i < cfg.eval_episodes; ++i)
            results.push_back(
                run_closed_loop(backend, cfg.vocab, cfg.episode, cfg.seed + 10'000 + i));
        return summarize_episodes(results).success_rate();
    };
    const double fp_rate = success_rate(fp);
    const double q_rate = success_rate(q);

    std::cout << "greedy-decode agreement: " << agreement.agreement << " over "
              << agreement.total << " observations\n"
              << "closed-loop success: fp32 " << fp_rate << ", quantized " << q_rate
              << " (delta " << fp_rate - q_rate << ")\n"
              << "note: agreement/success thresholds are artifact-chosen\n";
    if (!agreement.disagreeing.empty()) {
        std::cout << "disagreeing observations:";
        for (std::size_t idx : agreement.disagreeing) std::cout << " " << idx;
        std::cout << "\n";
    }
    nlohmann::json body = agreement_report_to_json(agreement);
    body["success_rate_fp32"] = fp_rate;
    body["success_rate_quantized"] = q_rate;
    body["success_rate_delta"] = fp_rate - q_rate;
    write_json_report(report_path, report_envelope(cfg, body));
    return 0;
}

int cmd_serve_bridge(const std::string& topic, std::uint16_t port,
                     const std::string& peer_host, std::uint16_t peer_port) {
    Bus bus;
    UdpBridge bridge(bus, topic, topic + "/udp_in", port, peer_host, peer_port);
    std::signal(SIGINT, [](int) { g_interrupted = true; });
    std::signal(SIGTERM, [](int) { g_interrupted = true; });
    std::cout << "bridging bus topic '" << topic << "' <-> udp :" << bridge.listen_port()
              << " (peer " << peer_host << ":" << peer_port << "); Ctrl-C to stop\n";
    while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    bridge.stop();
    std::cout << "forwarded " << bridge.forwarded_frames() << " frames, rejected "
              << bridge.rejected_datagrams() << " datagrams\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"litevla: local vision-language-action deployment pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::int64_t seed_flag = -1;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--seed", seed_flag, "seed override");

    std::string out_path, in_path, data_path, report_path, backend_spec, fp32_path,
        quant_path, topic = "cmd_vel", peer_host = "127.0.0.1";
    std::uint32_t n_observations = 1000;
    std::int64_t runs_flag = -1, warmup_flag = -1, episodes_flag = -1;
    std::uint16_t port = 0, peer_port = 0;

    auto* gen = app.add_subcommand("gen-data", "collect expert demonstrations");
    gen->add_option("--out", out_path)->required();
    gen->add_option("--episodes", episodes_flag);

    auto* train = app.add_subcommand("train", "supervised fine-tuning (FP32)");
    train->add_option("--data", data_path)->required();
    train->add_option("--out", out_path)->required();

    auto* quant = app.add_subcommand("quantize", "4-bit post-training compression");
    quant->add_option("--in", in_path)->required();
    quant->add_option("--out", out_path)->required();

    auto* inspect = app.add_subcommand("inspect", "validate and list a container");
    inspect->add_option("--in", in_path)->required();

    auto* eval = app.add_subcommand("eval-loop", "closed-loop episode evaluation");
    eval->add_option("--backend", backend_spec)->required();
    eval->add_option("--episodes", episodes_flag);
    eval->add_option("--report", report_path);

    auto* bench = app.add_subcommand("bench-latency", "end-to-end latency benchmark");
    bench->add_option("--backend", backend_spec)->required();
    bench->add_option("--runs", runs_flag);
    bench->add_option("--warmup", warmup_flag);
    bench->add_option("--report", report_path);

    auto* cmp = app.add_subcommand("compare-quant", "FP32 vs quantized agreement");
    cmp->add_option("--fp32", fp32_path)->required();
    cmp->add_option("--quant", quant_path)->required();
    cmp->add_option("--observations", n_observations);
    cmp->add_option("--episodes", episodes_flag);
    cmp->add_option("--report", report_path);

    auto* serve = app.add_subcommand("serve-bridge", "UDP <-> bus topic bridge");
    serve->add_option("--topic", topic);
    serve->add_option("--port", port);
    serve->add_option("--peer-host", peer_host);
    serve->add_option("--peer-port", peer_port);

    // allow the global --config/--seed flags after the subcommand name
    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = litevla::load_config(config_path);
        if (seed_flag >= 0) {
            cfg.seed = static_cast<std::uint64_t>(seed_flag);
            cfg.train.seed = cfg.seed;
            cfg.episode.seed = cfg.seed;
        }
        if (runs_flag >= 0) cfg.bench_runs = static_cast<std::uint64_t>(runs_flag);
        if (warmup_flag >= 0) cfg.bench_warmup = static_cast<std::uint64_t>(warmup_flag);
        if (episodes_flag >= 0) {
            cfg.dataset_episodes = static_cast<std::uint32_t>(episodes_flag);
            cfg.eval_episodes = static_cast<std::uint32_t>(episodes_flag);
        }

        if (gen->parsed()) return cmd_gen_data(cfg, out_path);
        if (train->parsed()) return cmd_train(cfg, data_path, out_path);
        if (quant->parsed()) return cmd_quantize(in_path, out_path);
        if (inspect->parsed()) return cmd_inspect(in_path);
        if (eval->parsed()) return cmd_eval_loop(cfg, backend_spec, report_path);
        if (bench->parsed()) return cmd_bench_latency(cfg, backend_spec, report_path);
        if (cmp->parsed())
            return cmd_compare_quant(cfg, fp32_path, quant_path, n_observations, report_path);
        if (serve->parsed()) {
            const std::uint16_t resolved = port != 0 ? port : litevla::bridge_port_from_env();
            const std::uint16_t peer = peer_port != 0 ? peer_port : resolved;
            return cmd_serve_bridge(topic, resolved, peer_host, peer);
        }
    } catch (const litevla::ContainerError& e) {
        std::cerr << R"({"error":"container","message":")" << e.what() << R"("})" << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << R"({"error":"runtime","message":")" << e.what() << R"("})" << "\n";
        return 1;
    }
    return 1;
}
