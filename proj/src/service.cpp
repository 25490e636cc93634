#include "quadloco/service.hpp"

#include <atomic>
#include <chrono>
#include <deque>
#include <mutex>
#include <set>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "quadloco/error.hpp"

namespace quadloco {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

SessionFactory default_session_factory() {
    return [](int level_id, const SimConfig& cfg) { return std::make_unique<Session>(bundled_level(level_id), cfg); };
}

namespace {

struct Outgoing {
    std::shared_ptr<const std::string> text;
    bool coalescable = false;
};

class Client;

struct Inbound {
    Command command;
    std::weak_ptr<Client> from;
};

class Hub {
public:
    virtual ~Hub() = default;
    virtual void on_open(const std::shared_ptr<Client>& client) = 0;
    virtual void on_message(const std::shared_ptr<Client>& client, std::string text) = 0;
    virtual void on_close(const std::shared_ptr<Client>& client) = 0;
};

class Client : public std::enable_shared_from_this<Client> {
public:
    Client(tcp::socket socket, Hub& hub) : ws_(std::move(socket)), hub_(hub) {}

    void run() {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.text(true);
        ws_.async_accept(beast::bind_front_handler(&Client::on_accept, shared_from_this()));
    }

    // Thread-safe.
    void send(std::shared_ptr<const std::string> text, bool coalescable) {
        net::post(ws_.get_executor(), [self = shared_from_this(), text = std::move(text), coalescable]() mutable {
            self->enqueue({std::move(text), coalescable});
        });
    }

    void close() {
        net::post(ws_.get_executor(), [self = shared_from_this()] {
            beast::error_code ec;
            beast::get_lowest_layer(self->ws_).socket().shutdown(tcp::socket::shutdown_both, ec);
            beast::get_lowest_layer(self->ws_).close();
        });
    }

private:
    void on_accept(beast::error_code ec) {
        if (ec) return;
        hub_.on_open(shared_from_this());
        read();
    }

    void read() {
        ws_.async_read(buffer_, beast::bind_front_handler(&Client::on_read, shared_from_this()));
    }

    void on_read(beast::error_code ec, std::size_t) {
        if (ec) {
            closed();
            return;
        }
        std::string text = beast::buffers_to_string(buffer_.data());
        buffer_.consume(buffer_.size());
        hub_.on_message(shared_from_this(), std::move(text));
        read();
    }

    void enqueue(Outgoing msg) {
        // Replace a queued state frame that is not already on the wire.
        const std::size_t in_flight = writing_ ? 1 : 0;
        if (msg.coalescable && queue_.size() > in_flight && queue_.back().coalescable) {
            queue_.back() = std::move(msg);
            return;
        }
        queue_.push_back(std::move(msg));
        if (!writing_) write_next();
    }

    void write_next() {
        if (queue_.empty() || closed_) {
            writing_ = false;
            return;
        }
        writing_ = true;
        ws_.async_write(net::buffer(*queue_.front().text),
                        beast::bind_front_handler(&Client::on_write, shared_from_this()));
    }

    void on_write(beast::error_code ec, std::size_t) {
        queue_.pop_front();
        if (ec) {
            closed();
            return;
        }
        write_next();
    }

    void closed() {
        if (closed_) return;
        closed_ = true;
        queue_.clear();
        hub_.on_close(shared_from_this());
    }

    websocket::stream<beast::tcp_stream> ws_;
    Hub& hub_;
    beast::flat_buffer buffer_;
    std::deque<Outgoing> queue_;
    bool writing_ = false;
    bool closed_ = false;
};

} // namespace

struct StreamService::Impl final : Hub {
    Impl(ServiceOptions o, SessionFactory f) : options(std::move(o)), factory(std::move(f)), bridge(options.bridge) {
        level_id = options.level_id;
        cfg = options.config;
        session = factory(level_id, cfg);
        metrics_snapshot = session->metrics();
    }

    ServiceOptions options;
    SessionFactory factory;

    net::io_context io{1};
    std::optional<tcp::acceptor> acceptor;
    std::thread io_thread;
    std::thread sim_thread;
    std::atomic<bool> running{false};
    std::uint16_t bound_port = 0;

    mutable std::mutex clients_mu;
    std::set<std::shared_ptr<Client>> clients;

    std::mutex commands_mu;
    std::deque<Inbound> commands;

    // Simulation state: touched only by the simulation thread once started.
    int level_id = 1;
    SimConfig cfg;
    std::unique_ptr<Session> session;
    SynthInputBridge bridge;
    bool paused = false;

    mutable std::mutex snapshot_mu;
    SessionMetrics metrics_snapshot;
    std::atomic<std::uint64_t> last_tick{0};
    std::atomic<int> current_level{1};

    void on_open(const std::shared_ptr<Client>& client) override {
        // Hello goes out before the client joins the broadcast.
        {
            std::lock_guard lock(hello_mu);
            client->send(std::make_shared<const std::string>(hello), false);
        }
        std::lock_guard lock(clients_mu);
        clients.insert(client);
    }

    void on_message(const std::shared_ptr<Client>& client, std::string text) override {
        try {
            Command c = decode_command(text);
            std::lock_guard lock(commands_mu);
            commands.push_back({std::move(c), client});
        } catch (const Error& e) {
            client->send(std::make_shared<const std::string>(encode_error(errc_name(e.code()), e.what(), std::nullopt)),
                         false);
        }
    }

    void on_close(const std::shared_ptr<Client>& client) override {
        std::lock_guard lock(clients_mu);
        clients.erase(client);
    }

    std::mutex hello_mu;
    std::string hello;

    void refresh_hello() {
        std::lock_guard lock(hello_mu);
        hello = encode_hello(level_id, session->level(), cfg, options.tick_rate);
    }

    void broadcast(const std::shared_ptr<const std::string>& text, bool coalescable) {
        std::lock_guard lock(clients_mu);
        for (const auto& c : clients) c->send(text, coalescable);
    }

    static void reply(const Inbound& in, std::string text) {
        if (auto c = in.from.lock()) c->send(std::make_shared<const std::string>(std::move(text)), false);
    }

    void new_session(int id) {
        session = factory(id, cfg);
        level_id = id;
        current_level = id;
        bridge.reset();
        refresh_hello();
    }

    void apply(const Inbound& in) {
        const Command& c = in.command;
        const std::string_view type = command_type(c);
        try {
            if (auto* l = std::get_if<cmd::LoadLevel>(&c.body)) {
                if (l->level < 1 || l->level > bundled_level_count())
                    throw Error(Errc::InvalidLevel, "no bundled level " + std::to_string(l->level));
                new_session(l->level);
                reply(in, encode_ack(type, c.id, &session->level(), level_id));
            } else if (std::holds_alternative<cmd::Reset>(c.body)) {
                new_session(level_id);
                reply(in, encode_ack(type, c.id, &session->level(), level_id));
            } else if (auto* p = std::get_if<cmd::SetParam>(&c.body)) {
                session->set_param(p->key, p->value);
                set_config_value(cfg, p->key, p->value);
                refresh_hello();
                reply(in, encode_param_ack(p->key, get_config_value(cfg, p->key), c.id));
            } else if (auto* li = std::get_if<cmd::LimbInput>(&c.body)) {
                bridge.apply(*li);
                reply(in, encode_ack(type, c.id));
            } else if (std::holds_alternative<cmd::Pause>(c.body)) {
                paused = true;
                reply(in, encode_ack(type, c.id));
            } else if (std::holds_alternative<cmd::Resume>(c.body)) {
                paused = false;
                reply(in, encode_ack(type, c.id));
            }
        } catch (const Error& e) {
            reply(in, encode_error(errc_name(e.code()), e.what(), c.id));
        }
    }

    void sim_loop() {
        using clock = std::chrono::steady_clock;
        const auto period = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(1.0 / options.tick_rate));
        auto next = clock::now();
        while (running) {
            std::deque<Inbound> batch;
            {
                std::lock_guard lock(commands_mu);
                batch.swap(commands);
            }
            for (const Inbound& in : batch) apply(in);

            if (!paused) {
                TickResult tr = session->tick(bridge);
                StateFrame frame = make_state_frame(*session, level_id, tr);
                frame.paused = paused;
                for (const GameEvent& e : tr.events)
                    broadcast(std::make_shared<const std::string>(encode_event(e, frame.tick)), false);
                broadcast(std::make_shared<const std::string>(encode_state(frame)), true);
                last_tick = frame.tick;
                std::lock_guard lock(snapshot_mu);
                metrics_snapshot = session->metrics();
            }

            next += period;
            const auto now = clock::now();
            if (now - next > std::chrono::milliseconds(250)) next = now;  // fell far behind; do not burst
            std::this_thread::sleep_until(next);
        }
    }

    void do_accept() {
        acceptor->async_accept(net::make_strand(io), [this](beast::error_code ec, tcp::socket socket) {
            if (ec) {
                if (ec == net::error::operation_aborted) return;
            } else {
                std::make_shared<Client>(std::move(socket), *this)->run();
            }
            if (running) do_accept();
        });
    }

    void start() {
        beast::error_code ec;
        const auto address = net::ip::make_address(options.host, ec);
        if (ec) throw Error(Errc::BindFailure, "bad bind address '" + options.host + "'");
        const tcp::endpoint endpoint(address, options.port);
        acceptor.emplace(io);
        acceptor->open(endpoint.protocol(), ec);
        if (!ec) acceptor->set_option(net::socket_base::reuse_address(true), ec);
        if (!ec) acceptor->bind(endpoint, ec);
        if (!ec) acceptor->listen(net::socket_base::max_listen_connections, ec);
        if (ec) {
            acceptor.reset();
            throw Error(Errc::BindFailure, "cannot bind " + options.host + ":" + std::to_string(options.port) + ": " +
                                               ec.message());
        }
        bound_port = acceptor->local_endpoint().port();
        refresh_hello();
        running = true;
        do_accept();
        io_thread = std::thread([this] { io.run(); });
        sim_thread = std::thread([this] { sim_loop(); });
    }

    void stop() {
        if (!running.exchange(false)) return;
        if (sim_thread.joinable()) sim_thread.join();
        net::post(io, [this] {
            beast::error_code ec;
            acceptor->close(ec);
        });
        {
            std::lock_guard lock(clients_mu);
            for (const auto& c : clients) c->close();
        }
        io.stop();
        if (io_thread.joinable()) io_thread.join();
        std::lock_guard lock(clients_mu);
        clients.clear();
    }
};

StreamService::StreamService(ServiceOptions options, SessionFactory factory)
    : impl_(std::make_unique<Impl>(std::move(options), std::move(factory))) {}

StreamService::~StreamService() { stop(); }

void StreamService::start() { impl_->start(); }
void StreamService::stop() { impl_->stop(); }
std::uint16_t StreamService::port() const { return impl_->bound_port; }
std::uint64_t StreamService::tick() const { return impl_->last_tick; }
int StreamService::level_id() const { return impl_->current_level; }

std::size_t StreamService::client_count() const {
    std::lock_guard lock(impl_->clients_mu);
    return impl_->clients.size();
}

SessionMetrics StreamService::metrics() const {
    std::lock_guard lock(impl_->snapshot_mu);
    return impl_->metrics_snapshot;
}

} // namespace quadloco
