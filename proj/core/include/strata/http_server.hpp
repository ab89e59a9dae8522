#pragma once

#include "strata/service.hpp"

#include <memory>
#include <string>
#include <thread>

namespace strata {

// cpp-httplib front end for a Service.
class HttpServer {
public:
    explicit HttpServer(Service& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    // Binds host:port; port 0 picks a free port. Returns the bound port.
    int bind(const std::string& host, int port);

    // Serves until stop(). Requires a prior bind().
    void listen();

    // listen() on a background thread; returns once the server accepts.
    void start();
    void stop();

    int port() const noexcept { return port_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::thread thread_;
    int port_ = -1;
};

// Splits "host:port" (or ":port", or "[v6]:port"). Throws Error(invalid_argument).
std::pair<std::string, int> parse_listen_address(const std::string& address);

} // namespace strata
