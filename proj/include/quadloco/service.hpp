#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "quadloco/bridge.hpp"
#include "quadloco/session.hpp"

namespace quadloco {

struct ServiceOptions {
    std::string host = "127.0.0.1";
    std::uint16_t port = 8765;  // 0 picks a free port
    int level_id = 1;
    SimConfig config;
    double tick_rate = kPhysicsRate;  // wall-clock pacing of the simulation thread
    BridgeParams bridge;
};

using SessionFactory = std::function<std::unique_ptr<Session>(int level_id, const SimConfig& cfg)>;

// Bundled level by id.
SessionFactory default_session_factory();

// WebSocket service streaming one live session to any number of clients.
//
// The simulation runs on its own thread. Clients never touch it: their
// commands go into a queue that is drained at tick boundaries in arrival
// order, and every tick's state is fanned out as one immutable message.
// A client that falls behind has queued state frames replaced by newer ones;
// acks, errors and events are never dropped and nothing is reordered.
class StreamService {
public:
    explicit StreamService(ServiceOptions options, SessionFactory factory = default_session_factory());
    ~StreamService();

    StreamService(const StreamService&) = delete;
    StreamService& operator=(const StreamService&) = delete;

    // Binds and starts the network and simulation threads. Throws
    // Error(BindFailure) if the address cannot be bound.
    void start();
    void stop();

    std::uint16_t port() const;
    std::uint64_t tick() const;
    std::size_t client_count() const;
    SessionMetrics metrics() const;
    int level_id() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace quadloco
