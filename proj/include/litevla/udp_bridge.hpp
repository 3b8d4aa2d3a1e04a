// SPDX-License-Identifier: Apache-2.0
//
// UDP transport for wire frames: one 68-byte frame per datagram, fire and
// forget, CRC-failed datagrams dropped. Default port 47474, overridable via
// the LITEVLA_BRIDGE_PORT environment variable.

#pragma once

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "litevla/bridge.hpp"

namespace litevla {

inline constexpr std::uint16_t kDefaultBridgePort = 47474;

inline std::uint16_t bridge_port_from_env() {
    if (const char* env = std::getenv("LITEVLA_BRIDGE_PORT")) {
        const long port = std::strtol(env, nullptr, 10);
        if (port > 0 && port <= 65535) return static_cast<std::uint16_t>(port);
        throw std::runtime_error("LITEVLA_BRIDGE_PORT: invalid port value");
    }
    return kDefaultBridgePort;
}

class UdpSocket {
public:
    UdpSocket() {
        fd_ = socket(AF_INET, SOCK_DGRAM, 0);
        if (fd_ < 0) throw std::runtime_error("UdpSocket: socket() failed");
    }
    ~UdpSocket() {
        if (fd_ >= 0) close(fd_);
    }
    UdpSocket(const UdpSocket&) = delete;
    UdpSocket& operator=(const UdpSocket&) = delete;

    void bind_port(std::uint16_t port) {
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_addr.s_addr = htonl(INADDR_ANY);
        addr.sin_port = htons(port);
        if (bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
            throw std::runtime_error("UdpSocket: bind to port " + std::to_string(port) +
                                     " failed");
    }

    std::uint16_t bound_port() const {
        sockaddr_in addr{};
        socklen_t len = sizeof(addr);
        if (getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) != 0)
            throw std::runtime_error("UdpSocket: getsockname failed");
        return ntohs(addr.sin_port);
    }

    void send_to(const std::string& host, std::uint16_t port,
                 std::span<const std::uint8_t> datagram) {
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(port);
        if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
            throw std::runtime_error("UdpSocket: bad address " + host);
        sendto(fd_, datagram.data(), datagram.size(), 0,
               reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
    }

    std::optional<std::vector<std::uint8_t>> receive(int timeout_ms) {
        pollfd pfd{fd_, POLLIN, 0};
        const int rc = poll(&pfd, 1, timeout_ms);
        if (rc <= 0) return std::nullopt;
        std::vector<std::uint8_t> buffer(2048);
        const ssize_t n = recvfrom(fd_, buffer.data(), buffer.size(), 0, nullptr, nullptr);
        if (n < 0) return std::nullopt;
        buffer.resize(static_cast<std::size_t>(n));
        return buffer;
    }

private:
    int fd_ = -1;
};

/// Forwards a bus topic to UDP datagrams and incoming datagrams back onto a
/// bus topic. CRC-invalid datagrams are counted and dropped.
class UdpBridge {
public:
    UdpBridge(Bus& bus, std::string outbound_topic, std::string inbound_topic,
              std::uint16_t listen_port, std::string peer_host, std::uint16_t peer_port)
        : bus_(bus),
          inbound_topic_(std::move(inbound_topic)),
          peer_host_(std::move(peer_host)),
          peer_port_(peer_port) {
        socket_.bind_port(listen_port);
        subscription_ = bus.subscribe(outbound_topic);
        sender_ = std::thread([this] { send_loop(); });
        receiver_ = std::thread([this] { receive_loop(); });
    }

    ~UdpBridge() { stop(); }

    void stop() {
        if (running_.exchange(false)) {
            if (sender_.joinable()) sender_.join();
            if (receiver_.joinable()) receiver_.join();
        }
    }

    std::uint16_t listen_port() const { return socket_.bound_port(); }
    std::uint64_t rejected_datagrams() const { return rejected_.load(); }
    std::uint64_t forwarded_frames() const { return forwarded_.load(); }

private:
    void send_loop() {
        while (running_) {
            if (auto msg = subscription_->pop_wait(std::chrono::milliseconds(50))) {
                const auto frame =
                    encode_twist(msg->twist, msg->seq, msg->timestamp_ns, msg->stale);
                socket_.send_to(peer_host_, peer_port_, frame);
                ++forwarded_;
            }
        }
    }

    void receive_loop() {
        while (running_) {
            auto datagram = socket_.receive(50);
            if (!datagram) continue;
            try {
                bus_.publish(inbound_topic_, decode_twist(*datagram));
            } catch (const FrameError&) {
                ++rejected_;
            }
        }
    }

    Bus& bus_;
    std::string inbound_topic_;
    std::string peer_host_;
    std::uint16_t peer_port_;
    UdpSocket socket_;
    std::shared_ptr<Subscription> subscription_;
    std::atomic<bool> running_{true};
    std::atomic<std::uint64_t> rejected_{0};
    std::atomic<std::uint64_t> forwarded_{0};
    std::thread sender_, receiver_;
};

}  // namespace litevla
