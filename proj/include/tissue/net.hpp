#pragma once

#include "tissue/ingest_queue.hpp"
#include "tissue/protocol.hpp"
#include "tissue/response.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace tissue {

inline constexpr std::string_view default_address_literal = "127.0.0.1:7170";

struct Endpoint {
    std::string host;
    std::uint16_t port = 0;
};

/// Parses `host:port` (or `[v6]:port`). Throws ParamError.
Endpoint parse_endpoint(std::string_view address);

/// $TISSUE_ADDR when set, otherwise 127.0.0.1:7170.
std::string default_address();

/// A connected stream socket with a line buffer. Move-only; closes on
/// destruction.
class Connection {
public:
    Connection() = default;
    explicit Connection(int fd) noexcept : fd_(fd) {}
    Connection(Connection&& other) noexcept;
    Connection& operator=(Connection&& other) noexcept;
    Connection(const Connection&) = delete;
    Connection& operator=(const Connection&) = delete;
    ~Connection();

    static Connection dial(const std::string& address);

    bool is_open() const noexcept { return fd_ >= 0; }
    int fd() const noexcept { return fd_; }

    /// Writes everything or throws TransportError.
    void send_all(std::string_view data);

    /// Next line without its terminator. Returns nullopt on timeout (a
    /// negative timeout blocks). Throws TransportError on EOF or error, and
    /// ProtocolError for a line longer than max_line (the line is dropped).
    std::optional<std::string> read_line(std::chrono::milliseconds timeout = std::chrono::milliseconds(-1),
                                         std::size_t max_line = 4096);

    /// Wakes a reader blocked on this socket from another thread.
    void shutdown() noexcept;
    void close() noexcept;

private:
    int fd_ = -1;
    std::string buffer_;
    bool discarding_ = false;
};

struct ServerStats {
    std::uint64_t sessions_opened = 0;
    std::uint64_t sessions_active = 0;
    std::uint64_t antigen_received = 0;
    std::uint64_t signals_received = 0;
    std::uint64_t protocol_errors = 0;
    std::uint64_t role_violations = 0;
    std::uint64_t responses_published = 0;
};

struct ServerOptions {
    /// Antigen at or above this value are answered with `E` and dropped.
    std::uint32_t antigen_alphabet = UINT32_MAX;
    std::size_t max_line = 4096;
};

/// Socket listener with one thread per client session. Antigen and signal
/// sessions append to the ingest queue; response sessions receive every
/// published record as an `R` line. Protocol errors only ever affect the
/// session that made them.
class Server {
public:
    /// Binds and listens (port 0 picks an ephemeral port). Throws
    /// TransportError when the address cannot be bound.
    Server(const std::string& address, std::shared_ptr<IngestQueue> queue, ServerOptions options = {});
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    std::uint16_t port() const noexcept { return port_; }
    std::string address() const;

    /// Thread-safe fan-out to every connected response session.
    void publish(const ResponseRecord& record);

    std::size_t response_sessions() const;
    ServerStats stats() const;

    void stop();

private:
    struct Session;

    void accept_loop();
    void serve_session(Session& session);
    void serve_responses(Session& session);
    void reap_finished();

    std::shared_ptr<IngestQueue> queue_;
    ServerOptions options_;
    std::string host_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};

    mutable std::mutex sessions_mutex_;
    std::vector<std::unique_ptr<Session>> sessions_;

    mutable std::mutex stats_mutex_;
    ServerStats stats_;

    std::thread accept_thread_;
};

/// Client side of one session. The role is fixed by the handshake.
class Client {
public:
    /// Connects and sends `H <role>`. Throws TransportError.
    static Client connect(const std::string& address, Role role);

    Role role() const noexcept { return role_; }

    void send_antigen(std::uint32_t value);
    void send_signal(std::uint32_t index, double level);
    void send_raw(std::string_view line);

    /// Next response record, or nullopt when none arrives within `timeout`.
    /// Never fabricates records. Throws TransportError when the server
    /// goes away.
    std::optional<ResponseRecord> recv_response(std::chrono::milliseconds timeout);

    /// Next raw line from the server (tests and diagnostics).
    std::optional<std::string> recv_line(std::chrono::milliseconds timeout);

    void close() noexcept { connection_.close(); }

private:
    Client(Connection c, Role r) : connection_(std::move(c)), role_(r) {}

    Connection connection_;
    Role role_;
};

}  // namespace tissue
