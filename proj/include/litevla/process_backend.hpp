// SPDX-License-Identifier: Apache-2.0
//
// Reasoning backend adapter for an external child process speaking the line
// protocol: one request `OBS <base64 f32 image bytes> GOAL <id>\n` in, one
// `ACTION <v> <w>\n` line out per decision. A missed per-decision deadline is
// a backend error; the episode runner turns it into the zero-velocity
// fail-safe.

#pragma once

#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "litevla/action_parser.hpp"
#include "litevla/sim.hpp"
#include "litevla/util.hpp"

namespace litevla {

class ExternalProcessBackend : public ReasoningBackend {
public:
    ExternalProcessBackend(const std::string& command_line, ActionVocabulary vocab,
                           std::chrono::milliseconds timeout = std::chrono::milliseconds(2000))
        : vocab_(vocab), timeout_(timeout) {
        std::vector<std::string> args;
        std::istringstream split(command_line);
        for (std::string tok; split >> tok;) args.push_back(tok);
        if (args.empty())
            throw BackendError("ExternalProcessBackend: empty command line");
        spawn(args);
    }

    ExternalProcessBackend(const ExternalProcessBackend&) = delete;
    ExternalProcessBackend& operator=(const ExternalProcessBackend&) = delete;

    ~ExternalProcessBackend() override {
        if (to_child_ >= 0) close(to_child_);
        if (from_child_ >= 0) close(from_child_);
        if (pid_ > 0) {
            kill(pid_, SIGTERM);
            int status = 0;
            waitpid(pid_, &status, 0);
        }
    }

    ActionTokenSeq infer(const Observation& obs) override {
        std::vector<std::uint8_t> raw;
        raw.reserve(obs.image.size() * 4);
        for (double x : obs.image) put_le(raw, static_cast<float>(x));
        const std::string request = "OBS " + base64_encode(raw) + " GOAL " +
                                    std::to_string(obs.goal.goal_id) + "\n";
        write_all(request);
        const std::string line = read_line_deadline();
        const ParseResult parsed = parse_action_line(line, vocab_);
        if (const auto* rejection = std::get_if<ParseRejection>(&parsed))
            throw BackendError("external backend produced a rejected line: " +
                               rejection->message);
        return std::get<ParsedAction>(parsed).tokens;
    }

private:
    void spawn(const std::vector<std::string>& args) {
        int in_pipe[2], out_pipe[2];
        if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
            throw BackendError("ExternalProcessBackend: pipe failed");
        pid_ = fork();
        if (pid_ < 0) throw BackendError("ExternalProcessBackend: fork failed");
        if (pid_ == 0) {
            dup2(in_pipe[0], STDIN_FILENO);
            dup2(out_pipe[1], STDOUT_FILENO);
            close(in_pipe[0]);
            close(in_pipe[1]);
            close(out_pipe[0]);
            close(out_pipe[1]);
            std::vector<char*> argv;
            for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
            argv.push_back(nullptr);
            execvp(argv[0], argv.data());
            _exit(127);
        }
        close(in_pipe[0]);
        close(out_pipe[1]);
        to_child_ = in_pipe[1];
        from_child_ = out_pipe[0];
    }

    void write_all(const std::string& data) {
        std::size_t written = 0;
        while (written < data.size()) {
            const ssize_t n = write(to_child_, data.data() + written, data.size() - written);
            if (n <= 0) throw BackendError("ExternalProcessBackend: write failed");
            written += static_cast<std::size_t>(n);
        }
    }

    std::string read_line_deadline() {
        const auto deadline = std::chrono::steady_clock::now() + timeout_;
        while (true) {
            if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
                std::string line = buffer_.substr(0, nl + 1);
                buffer_.erase(0, nl + 1);
                return line;
            }
            const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                deadline - std::chrono::steady_clock::now());
            if (remaining.count() <= 0)
                throw BackendError("ExternalProcessBackend: decision timeout");
            pollfd pfd{from_child_, POLLIN, 0};
            const int rc = poll(&pfd, 1, static_cast<int>(remaining.count()));
            if (rc < 0) throw BackendError("ExternalProcessBackend: poll failed");
            if (rc == 0) throw BackendError("ExternalProcessBackend: decision timeout");
            char chunk[512];
            const ssize_t n = read(from_child_, chunk, sizeof(chunk));
            if (n <= 0) throw BackendError("ExternalProcessBackend: child closed stdout");
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

    ActionVocabulary vocab_;
    std::chrono::milliseconds timeout_;
    pid_t pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
};

}  // namespace litevla
