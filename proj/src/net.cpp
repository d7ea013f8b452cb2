#include "tissue/net.hpp"

#include "tissue/error.hpp"
#include "tissue/text.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <condition_variable>
#include <cstdlib>
#include <cstring>
#include <deque>

namespace tissue {

namespace {

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

struct AddrInfo {
    addrinfo* head = nullptr;
    ~AddrInfo() {
        if (head) freeaddrinfo(head);
    }
};

AddrInfo resolve(const Endpoint& ep, bool passive) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = passive ? AI_PASSIVE : 0;
    AddrInfo info;
    const auto port = std::to_string(ep.port);
    const int rc = getaddrinfo(ep.host.empty() ? nullptr : ep.host.c_str(), port.c_str(), &hints, &info.head);
    if (rc != 0) throw TransportError("cannot resolve '" + ep.host + "': " + gai_strerror(rc));
    return info;
}

}  // namespace

Endpoint parse_endpoint(std::string_view address) {
    address = trim(address);
    const auto colon = address.rfind(':');
    if (colon == std::string_view::npos) throw ParamError("address must be host:port, got '" + std::string(address) + "'");
    auto host = address.substr(0, colon);
    if (host.size() >= 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
    const auto port = to_u32(address.substr(colon + 1));
    if (!port || *port > 65535) throw ParamError("bad port in '" + std::string(address) + "'");
    return Endpoint{std::string(host), static_cast<std::uint16_t>(*port)};
}

std::string default_address() {
    if (const char* env = std::getenv("TISSUE_ADDR"); env && *env) return env;
    return std::string(default_address_literal);
}

// ---------------------------------------------------------------------------
// Connection

Connection::Connection(Connection&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)), buffer_(std::move(other.buffer_)), discarding_(other.discarding_) {}

Connection& Connection::operator=(Connection&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = std::exchange(other.fd_, -1);
        buffer_ = std::move(other.buffer_);
        discarding_ = other.discarding_;
    }
    return *this;
}

Connection::~Connection() { close(); }

Connection Connection::dial(const std::string& address) {
    const auto ep = parse_endpoint(address);
    auto info = resolve(ep, false);
    std::string last_error = "no addresses";
    for (auto* ai = info.head; ai; ai = ai->ai_next) {
        const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
        if (fd < 0) {
            last_error = errno_text("socket");
            continue;
        }
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
            int one = 1;
            ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
            return Connection(fd);
        }
        last_error = errno_text("connect");
        ::close(fd);
    }
    throw TransportError("cannot connect to " + address + ": " + last_error);
}

void Connection::send_all(std::string_view data) {
    if (fd_ < 0) throw TransportError("connection closed");
    while (!data.empty()) {
        const auto n = ::send(fd_, data.data(), data.size(), MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw TransportError(errno_text("send"));
        }
        data.remove_prefix(static_cast<std::size_t>(n));
    }
}

std::optional<std::string> Connection::read_line(std::chrono::milliseconds timeout, std::size_t max_line) {
    using clock = std::chrono::steady_clock;
    const auto deadline = clock::now() + timeout;
    std::array<char, 4096> chunk{};
    while (true) {
        const auto nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            if (discarding_ || line.size() > max_line) {
                discarding_ = false;
                throw ProtocolError("line exceeds " + std::to_string(max_line) + " bytes");
            }
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        if (buffer_.size() > max_line) {
            buffer_.clear();
            discarding_ = true;
        }
        if (fd_ < 0) throw TransportError("connection closed");
        if (timeout.count() >= 0) {
            const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now());
            pollfd p{fd_, POLLIN, 0};
            const int rc = ::poll(&p, 1, static_cast<int>(std::max<std::int64_t>(0, left.count())));
            if (rc < 0) {
                if (errno == EINTR) continue;
                throw TransportError(errno_text("poll"));
            }
            if (rc == 0) return std::nullopt;
        }
        const auto n = ::recv(fd_, chunk.data(), chunk.size(), 0);
        if (n == 0) throw TransportError("connection closed by peer");
        if (n < 0) {
            if (errno == EINTR) continue;
            throw TransportError(errno_text("recv"));
        }
        buffer_.append(chunk.data(), static_cast<std::size_t>(n));
    }
}

void Connection::shutdown() noexcept {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

void Connection::close() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
}

// ---------------------------------------------------------------------------
// Server

struct Server::Session {
    Connection conn;
    std::thread thread;
    std::atomic<bool> done{false};
    bool receives_responses = false;

    std::mutex out_mutex;
    std::condition_variable out_cv;
    std::deque<std::string> outbox;
};

Server::Server(const std::string& address, std::shared_ptr<IngestQueue> queue, ServerOptions options)
    : queue_(std::move(queue)), options_(options) {
    const auto ep = parse_endpoint(address);
    host_ = ep.host;
    auto info = resolve(ep, true);
    std::string last_error = "no addresses";
    for (auto* ai = info.head; ai; ai = ai->ai_next) {
        const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
        if (fd < 0) {
            last_error = errno_text("socket");
            continue;
        }
        int one = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 64) == 0) {
            listen_fd_ = fd;
            break;
        }
        last_error = errno_text("bind");
        ::close(fd);
    }
    if (listen_fd_ < 0) throw TransportError("cannot listen on " + address + ": " + last_error);

    sockaddr_storage bound{};
    socklen_t len = sizeof bound;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    if (bound.ss_family == AF_INET)
        port_ = ntohs(reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
    else
        port_ = ntohs(reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port);

    accept_thread_ = std::thread([this] { accept_loop(); });
}

Server::~Server() { stop(); }

std::string Server::address() const {
    const bool v6 = host_.find(':') != std::string::npos;
    return (v6 ? "[" + host_ + "]" : host_) + ":" + std::to_string(port_);
}

void Server::accept_loop() {
    while (!stopping_) {
        pollfd p{listen_fd_, POLLIN, 0};
        const int rc = ::poll(&p, 1, 100);
        if (rc <= 0) continue;
        const int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
        if (fd < 0) continue;
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);

        reap_finished();
        auto session = std::make_unique<Session>();
        session->conn = Connection(fd);
        auto* raw = session.get();
        {
            std::lock_guard lock(stats_mutex_);
            ++stats_.sessions_opened;
            ++stats_.sessions_active;
        }
        std::lock_guard lock(sessions_mutex_);
        if (stopping_) break;
        session->thread = std::thread([this, raw] {
            serve_session(*raw);
            raw->conn.shutdown();
            {
                std::lock_guard stats_lock(stats_mutex_);
                --stats_.sessions_active;
            }
            raw->done = true;
        });
        sessions_.push_back(std::move(session));
    }
}

void Server::reap_finished() {
    std::lock_guard lock(sessions_mutex_);
    std::erase_if(sessions_, [](const std::unique_ptr<Session>& s) {
        if (!s->done) return false;
        if (s->thread.joinable()) s->thread.join();
        return true;
    });
}

void Server::serve_session(Session& s) {
    const auto reply_error = [&](const std::string& text) {
        try {
            s.conn.send_all(encode_message(wire::ErrorMsg{text}));
        } catch (const TransportError&) {
        }
    };
    const auto violation = [&](const std::string& text) {
        {
            std::lock_guard lock(stats_mutex_);
            ++stats_.role_violations;
        }
        reply_error(text);
    };

    std::optional<Role> role;
    while (!stopping_) {
        WireMessage msg;
        try {
            auto line = s.conn.read_line(std::chrono::milliseconds(-1), options_.max_line);
            msg = decode_message(*line);
        } catch (const ProtocolError& e) {
            {
                std::lock_guard lock(stats_mutex_);
                ++stats_.protocol_errors;
            }
            reply_error(e.what());
            continue;
        } catch (const TransportError&) {
            return;
        }

        if (!role) {
            const auto* hello = std::get_if<wire::Hello>(&msg);
            if (!hello) return violation("expected H <role> first");
            role = hello->role;
            if (*role == Role::response) return serve_responses(s);
            continue;
        }

        if (*role == Role::antigen) {
            const auto* a = std::get_if<wire::AntigenMsg>(&msg);
            if (!a) return violation("antigen session carries only A messages");
            if (a->value >= options_.antigen_alphabet) {
                std::lock_guard lock(stats_mutex_);
                ++stats_.protocol_errors;
                reply_error("antigen " + std::to_string(a->value) + " outside alphabet");
                continue;
            }
            queue_->push(Antigen{a->value});
            std::lock_guard lock(stats_mutex_);
            ++stats_.antigen_received;
        } else {
            const auto* sig = std::get_if<wire::SignalMsg>(&msg);
            if (!sig) return violation("signal session carries only S messages");
            queue_->push(SignalUpdate{sig->index, sig->level});
            std::lock_guard lock(stats_mutex_);
            ++stats_.signals_received;
        }
    }
}

void Server::serve_responses(Session& s) {
    {
        std::lock_guard lock(s.out_mutex);
        s.receives_responses = true;
    }
    std::deque<std::string> batch;
    while (!stopping_) {
        {
            std::unique_lock lock(s.out_mutex);
            s.out_cv.wait_for(lock, std::chrono::milliseconds(50), [&] { return !s.outbox.empty() || stopping_; });
            batch.swap(s.outbox);
        }
        try {
            for (const auto& line : batch) s.conn.send_all(line);
            batch.clear();
            // receive-only: any inbound line ends the session
            if (auto line = s.conn.read_line(std::chrono::milliseconds(0), options_.max_line)) {
                std::lock_guard lock(stats_mutex_);
                ++stats_.role_violations;
                s.conn.send_all(encode_message(wire::ErrorMsg{"response session is receive-only"}));
                return;
            }
        } catch (const Error&) {
            return;
        }
    }
}

void Server::publish(const ResponseRecord& record) {
    const auto line = encode_message(wire::ResponseMsg{record.tick, record.value.value});
    {
        std::lock_guard lock(stats_mutex_);
        ++stats_.responses_published;
    }
    std::lock_guard lock(sessions_mutex_);
    for (auto& s : sessions_) {
        if (s->done) continue;
        std::lock_guard out(s->out_mutex);
        if (!s->receives_responses) continue;
        s->outbox.push_back(line);
        s->out_cv.notify_one();
    }
}

std::size_t Server::response_sessions() const {
    std::lock_guard lock(sessions_mutex_);
    std::size_t n = 0;
    for (const auto& s : sessions_) {
        std::lock_guard out(s->out_mutex);
        if (!s->done && s->receives_responses) ++n;
    }
    return n;
}

ServerStats Server::stats() const {
    std::lock_guard lock(stats_mutex_);
    return stats_;
}

void Server::stop() {
    if (stopping_.exchange(true)) return;
    if (accept_thread_.joinable()) accept_thread_.join();
    std::vector<std::unique_ptr<Session>> sessions;
    {
        std::lock_guard lock(sessions_mutex_);
        sessions.swap(sessions_);
    }
    for (auto& s : sessions) {
        s->conn.shutdown();
        s->out_cv.notify_all();
    }
    for (auto& s : sessions)
        if (s->thread.joinable()) s->thread.join();
    if (listen_fd_ >= 0) ::close(listen_fd_);
    listen_fd_ = -1;
}

// ---------------------------------------------------------------------------
// Client

Client Client::connect(const std::string& address, Role role) {
    auto conn = Connection::dial(address);
    conn.send_all(encode_message(wire::Hello{role}));
    return Client(std::move(conn), role);
}

void Client::send_antigen(std::uint32_t value) {
    if (role_ != Role::antigen) throw ProtocolError("not an antigen session");
    connection_.send_all(encode_message(wire::AntigenMsg{value}));
}

void Client::send_signal(std::uint32_t index, double level) {
    if (role_ != Role::signal) throw ProtocolError("not a signal session");
    connection_.send_all(encode_message(wire::SignalMsg{index, level}));
}

void Client::send_raw(std::string_view line) { connection_.send_all(line); }

std::optional<std::string> Client::recv_line(std::chrono::milliseconds timeout) {
    return connection_.read_line(timeout);
}

std::optional<ResponseRecord> Client::recv_response(std::chrono::milliseconds timeout) {
    auto line = connection_.read_line(timeout);
    if (!line) return std::nullopt;
    auto msg = decode_message(*line);
    if (const auto* r = std::get_if<wire::ResponseMsg>(&msg)) return ResponseRecord{r->tick, 0, Antigen{r->value}};
    if (const auto* e = std::get_if<wire::ErrorMsg>(&msg)) throw ProtocolError("server error: " + e->text);
    throw ProtocolError("unexpected message on response session");
}

}  // namespace tissue
