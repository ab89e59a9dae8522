#include "strata/http_server.hpp"

#include "strata/error.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

namespace strata {

struct HttpServer::Impl {
    httplib::Server server;
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>()) {
    auto dispatch = [&service](const httplib::Request& req, httplib::Response& res) {
        ServiceRequest request;
        request.method = req.method;
        request.path = req.path;
        request.body = req.body;
        for (const auto& [key, value] : req.params) request.query.emplace(key, value);
        if (req.has_header("Authorization")) request.authorization = req.get_header_value("Authorization");
        ServiceResponse response = service.handle(request);
        res.status = response.status;
        res.set_content(response.body, response.content_type.c_str());
    };
    impl_->server.Get(".*", dispatch);
    impl_->server.Post(".*", dispatch);
    impl_->server.Delete(".*", dispatch);
    impl_->server.Put(".*", dispatch);
    impl_->server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
        spdlog::debug("{} {} {}", req.method, req.path, res.status);
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) {
        port_ = impl_->server.bind_to_any_port(host);
    } else {
        port_ = impl_->server.bind_to_port(host, port) ? port : -1;
    }
    if (port_ < 0) throw Error(ErrorCode::io, "cannot bind " + host + ":" + std::to_string(port));
    return port_;
}

void HttpServer::listen() {
    if (port_ < 0) throw Error(ErrorCode::invalid_argument, "HttpServer::listen before bind");
    if (!impl_->server.listen_after_bind()) throw Error(ErrorCode::io, "HTTP server stopped with an error");
}

void HttpServer::start() {
    if (port_ < 0) throw Error(ErrorCode::invalid_argument, "HttpServer::start before bind");
    thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void HttpServer::stop() {
    impl_->server.stop();
    if (thread_.joinable()) thread_.join();
}

std::pair<std::string, int> parse_listen_address(const std::string& address) {
    const auto colon = address.rfind(':');
    if (colon == std::string::npos) throw_invalid_argument("listen address must be host:port, got '" + address + "'");
    std::string host = address.substr(0, colon);
    if (host.size() >= 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
    if (host.empty()) host = "0.0.0.0";
    int port = 0;
    try {
        std::size_t used = 0;
        port = std::stoi(address.substr(colon + 1), &used);
        if (used != address.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw_invalid_argument("invalid port in listen address '" + address + "'");
    }
    if (port < 0 || port > 65535) throw_invalid_argument("port out of range in '" + address + "'");
    return {host, port};
}

} // namespace strata
