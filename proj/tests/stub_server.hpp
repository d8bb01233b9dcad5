#pragma once

#include <atomic>
#include <functional>
#include <string>
#include <thread>

#include "httplib.h"

namespace cer::testing {

/// Local HTTP server for provider tests. Handlers are registered before
/// start(); the server stops on destruction.
class StubServer {
  public:
    using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

    void post(const std::string& path, Handler handler) {
        server_.Post(path, [this, handler](const httplib::Request& req, httplib::Response& res) {
            ++hits_;
            handler(req, res);
        });
    }

    void start() {
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~StubServer() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    [[nodiscard]] std::string url(const std::string& path) const {
        return "http://127.0.0.1:" + std::to_string(port_) + path;
    }
    [[nodiscard]] int hits() const { return hits_.load(); }

  private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<int> hits_{0};
};

}  // namespace cer::testing
