#include "server.hpp"

#include <atomic>
#include <csignal>
#include <iostream>
#include <mutex>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast.hpp>
#include <spdlog/spdlog.h>

#include "fatpad/bundle.hpp"
#include "fatpad/error.hpp"
#include "fatpad/obj_io.hpp"
#include "fatpad/session.hpp"

namespace fatpad::cli {

namespace fs = std::filesystem;
namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

bool offers_protocol(std::string_view header, std::string_view wanted) {
  while (!header.empty()) {
    const auto comma = header.find(',');
    std::string_view item = header.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item == wanted) return true;
    if (comma == std::string_view::npos) break;
    header.remove_prefix(comma + 1);
  }
  return false;
}

std::string_view mime_type(const fs::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".obj") return "text/plain";
  return "application/octet-stream";
}

}  // namespace

struct SessionServer::Impl {
  std::shared_ptr<const Rig> rig;
  std::optional<fs::path> www;
  net::io_context ioc;
  tcp::acceptor acceptor;
  std::optional<net::signal_set> signals;
  std::mutex mutex;
  std::vector<std::thread> workers;
  std::vector<std::weak_ptr<tcp::socket>> sockets;
  std::atomic<bool> stopped{false};

  Impl(std::shared_ptr<const Rig> r, const std::string& host, unsigned short port, std::optional<fs::path> w)
      : rig(std::move(r)), www(std::move(w)), acceptor(ioc, tcp::endpoint(net::ip::make_address(host), port)) {}

  void accept_next() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket s) {
      if (ec || stopped) return;
      auto sock = std::make_shared<tcp::socket>(std::move(s));
      {
        std::lock_guard lock(mutex);
        sockets.push_back(sock);
        workers.emplace_back([this, sock] { serve(sock); });
      }
      accept_next();
    });
  }

  void serve(const std::shared_ptr<tcp::socket>& sock) {
    beast::error_code ec;
    const auto peer = sock->remote_endpoint(ec);
    try {
      beast::flat_buffer buffer;
      http::request<http::string_body> req;
      http::read(*sock, buffer, req);
      if (websocket::is_upgrade(req)) {
        serve_websocket(*sock, req);
      } else {
        serve_http(*sock, req);
      }
    } catch (const beast::system_error& e) {
      if (e.code() != websocket::error::closed && e.code() != http::error::end_of_stream && !stopped) {
        spdlog::info("connection {}: {}", peer.address().to_string(), e.code().message());
      }
    } catch (const std::exception& e) {
      spdlog::warn("connection {}: {}", peer.address().to_string(), e.what());
    }
    sock->shutdown(tcp::socket::shutdown_both, ec);
  }

  void serve_websocket(tcp::socket& sock, const http::request<http::string_body>& req) {
    const auto offered = req[http::field::sec_websocket_protocol];
    if (!offers_protocol(std::string_view(offered.data(), offered.size()), kProtocol)) {
      http::response<http::string_body> res{http::status::bad_request, req.version()};
      res.set(http::field::content_type, "text/plain");
      res.body() = std::string("websocket clients must request the ") + kProtocol + " subprotocol\n";
      res.prepare_payload();
      http::write(sock, res);
      return;
    }
    websocket::stream<tcp::socket&> ws(sock);
    ws.set_option(websocket::stream_base::decorator([](websocket::response_type& res) {
      res.set(http::field::server, "fatpad");
      res.set(http::field::sec_websocket_protocol, kProtocol);
    }));
    ws.accept(req);
    Session session(rig);
    spdlog::info("session opened");
    for (;;) {
      beast::flat_buffer buffer;
      ws.read(buffer);
      const std::string text = beast::buffers_to_string(buffer.data());
      for (const std::string& reply : session.handle(text)) {
        ws.text(true);
        ws.write(net::buffer(reply));
      }
    }
  }

  void serve_http(tcp::socket& sock, const http::request<http::string_body>& req) {
    auto respond = [&](http::status status, std::string body, std::string_view type) {
      http::response<http::string_body> res{status, req.version()};
      res.set(http::field::server, "fatpad");
      res.set(http::field::content_type, std::string(type));
      res.body() = std::move(body);
      res.prepare_payload();
      http::write(sock, res);
    };
    std::string target(req.target());
    if (req.method() != http::verb::get || !www || target.empty() || target.front() != '/' ||
        target.find("..") != std::string::npos) {
      respond(http::status::not_found, "not found\n", "text/plain");
      return;
    }
    if (target.back() == '/') target += "index.html";
    const fs::path file = *www / target.substr(1);
    std::error_code ec;
    if (!fs::is_regular_file(file, ec)) {
      respond(http::status::not_found, "not found\n", "text/plain");
      return;
    }
    respond(http::status::ok, read_text_file(file), mime_type(file));
  }

  void stop() {
    if (stopped.exchange(true)) return;
    net::post(ioc, [this] {
      beast::error_code ec;
      acceptor.close(ec);
      if (signals) signals->cancel(ec);
    });
    std::lock_guard lock(mutex);
    for (const auto& weak : sockets) {
      if (auto s = weak.lock()) {
        beast::error_code ec;
        s->shutdown(tcp::socket::shutdown_both, ec);
      }
    }
  }
};

SessionServer::SessionServer(std::shared_ptr<const Rig> rig, const std::string& host, unsigned short port,
                             std::optional<fs::path> www)
    : impl_(std::make_unique<Impl>(std::move(rig), host, port, std::move(www))) {}

SessionServer::~SessionServer() {
  impl_->stop();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(impl_->mutex);
    workers.swap(impl_->workers);
  }
  for (std::thread& t : workers) t.join();
}

unsigned short SessionServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void SessionServer::stop_on_signals() {
  impl_->signals.emplace(impl_->ioc, SIGINT, SIGTERM);
  impl_->signals->async_wait([this](beast::error_code ec, int) {
    if (!ec) stop();
  });
}

void SessionServer::run() {
  impl_->accept_next();
  impl_->ioc.run();
}

void SessionServer::stop() { impl_->stop(); }

int run_serve(const fs::path& bundle, const std::string& host, unsigned short port,
              const std::optional<fs::path>& www) {
  try {
    SessionServer server(load_bundle(bundle), host, port, www);
    server.stop_on_signals();
    std::cout << "listening on ws://" << host << ":" << server.port() << " (subprotocol " << kProtocol << ")"
              << std::endl;
    server.run();
    return 0;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.detail() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 1;
}

}  // namespace fatpad::cli
