#include "rico/gateway.hpp"

#include <atomic>
#include <charconv>
#include <deque>
#include <set>
#include <stdexcept>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

namespace rico {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

constexpr std::size_t kMaxMessage = 64 * 1024;
constexpr std::size_t kMaxBacklog = 64;  // queued outgoing messages per client

using Message = std::shared_ptr<const std::string>;

class WsSession;

// All members are touched only from the io thread.
struct Hub {
  std::set<std::shared_ptr<WsSession>> sessions;
  std::atomic<std::size_t> count{0};
  void join(std::shared_ptr<WsSession> s) {
    sessions.insert(std::move(s));
    count = sessions.size();
  }
  void leave(const std::shared_ptr<WsSession>& s) {
    sessions.erase(s);
    count = sessions.size();
  }
  void broadcast(const Message& m);
};

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, Hub& hub, WorldLoop& loop) : ws_(std::move(socket)), hub_(hub), loop_(loop) {}

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.read_message_max(kMaxMessage);
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

  void send(Message m) {
    if (closed_) return;
    if (queue_.size() >= kMaxBacklog) queue_.erase(queue_.begin() + 1);  // a slow reader loses old frames
    queue_.push_back(std::move(m));
    if (queue_.size() == 1) write_next();
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    hub_.join(shared_from_this());
    send(std::make_shared<const std::string>(loop_.hello()));
    read_next();
  }

  void read_next() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return close();
    std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    if (!ws_.got_text()) {
      send(std::make_shared<const std::string>(error_message("binary messages are not supported")));
    } else {
      auto parsed = parse_command(text);
      if (auto* err = std::get_if<CommandError>(&parsed)) {
        send(std::make_shared<const std::string>(error_message(err->reason)));
      } else {
        std::weak_ptr<WsSession> weak = shared_from_this();
        auto executor = ws_.get_executor();
        loop_.post(std::get<Command>(std::move(parsed)), [weak, executor](const std::string& reason) {
          net::post(executor, [weak, reason] {
            if (auto self = weak.lock()) self->send(std::make_shared<const std::string>(error_message(reason)));
          });
        });
      }
    }
    read_next();
  }

  void write_next() {
    ws_.text(true);
    ws_.async_write(net::buffer(*queue_.front()), beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) return close();
    queue_.pop_front();
    if (!queue_.empty()) write_next();
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    queue_.clear();
    hub_.leave(shared_from_this());
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<Message> queue_;
  Hub& hub_;
  WorldLoop& loop_;
  bool closed_ = false;
};

void Hub::broadcast(const Message& m) {
  // Copy: a failing send may leave the hub while we iterate.
  const auto targets = sessions;
  for (const auto& s : targets) s->send(m);
}

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, Hub& hub, WorldLoop& loop) : stream_(std::move(socket)), hub_(hub), loop_(loop) {}

  void run() {
    stream_.expires_after(std::chrono::seconds(30));
    parser_.body_limit(kMaxMessage);
    http::async_read(stream_, buffer_, parser_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

 private:
  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return;
    auto req = parser_.release();
    if (websocket::is_upgrade(req)) {
      stream_.expires_never();
      std::make_shared<WsSession>(stream_.release_socket(), hub_, loop_)->run(std::move(req));
      return;
    }
    const nlohmann::json status = {{"service", "rico"},
                                   {"protocol", kProtocolVersion},
                                   {"clients", hub_.count.load()},
                                   {"frames", loop_.frames()},
                                   {"running", loop_.running()}};
    auto res = std::make_shared<http::response<http::string_body>>(http::status::ok, req.version());
    res->set(http::field::content_type, "application/json");
    res->set(http::field::access_control_allow_origin, "*");
    res->keep_alive(false);
    res->body() = status.dump();
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
      beast::error_code ignored;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
    });
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request_parser<http::string_body> parser_;
  Hub& hub_;
  WorldLoop& loop_;
};

}  // namespace

struct Gateway::Impl {
  net::io_context ioc{1};
  tcp::acceptor acceptor{ioc};
  net::signal_set signals{ioc};
  Hub hub;
  WorldLoop& loop;

  explicit Impl(WorldLoop& l) : loop(l) {}

  void accept() {
    // Handlers capture `this`; they are destroyed with `ioc` and never run after it.
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket s) {
      if (!ec) std::make_shared<HttpSession>(std::move(s), hub, loop)->run();
      if (ec != net::error::operation_aborted && acceptor.is_open()) accept();
    });
  }
};

Gateway::Gateway(WorldLoop& loop, const std::string& address, std::uint16_t port)
    : impl_(std::make_shared<Impl>(loop)) {
  beast::error_code ec;
  const auto addr = net::ip::make_address(address, ec);
  if (ec) throw std::runtime_error("invalid bind address '" + address + "': " + ec.message());
  const tcp::endpoint ep{addr, port};
  auto fail = [&](const char* what) {
    throw std::runtime_error(std::string("cannot ") + what + " " + address + ":" + std::to_string(port) + ": " +
                             ec.message());
  };
  impl_->acceptor.open(ep.protocol(), ec);
  if (ec) fail("open");
  impl_->acceptor.set_option(net::socket_base::reuse_address(true), ec);
  impl_->acceptor.bind(ep, ec);
  if (ec) fail("bind");
  impl_->acceptor.listen(net::socket_base::max_listen_connections, ec);
  if (ec) fail("listen on");

  std::weak_ptr<Impl> weak = impl_;
  loop.set_publisher([weak](Message m) {
    if (auto impl = weak.lock()) net::post(impl->ioc, [impl, m] { impl->hub.broadcast(m); });
  });
  impl_->accept();
}

// The loop keeps a weak reference to us, so it may outlive the gateway.
Gateway::~Gateway() { stop(); }

std::uint16_t Gateway::port() const { return impl_->acceptor.local_endpoint().port(); }

std::size_t Gateway::clients() const { return impl_->hub.count.load(); }

void Gateway::run() { impl_->ioc.run(); }

void Gateway::stop_on_signals() {
  impl_->signals.add(SIGINT);
  impl_->signals.add(SIGTERM);
  impl_->signals.async_wait([this](beast::error_code ec, int) {
    if (!ec) stop();
  });
}

void Gateway::stop() { impl_->ioc.stop(); }

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size())
    throw std::invalid_argument("expected ADDRESS:PORT, got '" + text + "'");
  std::string host = text.substr(0, colon);
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  unsigned port = 0;
  const char* first = text.data() + colon + 1;
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, port);
  if (ec != std::errc() || ptr != last || port > 65535) throw std::invalid_argument("invalid port in '" + text + "'");
  return {host, static_cast<std::uint16_t>(port)};
}

}  // namespace rico
