#pragma once

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <memory>
#include <string>

#include "avalon/gateway.hpp"

namespace avalon {

// Chat-completion transport over HTTP(S). Targets linking this header need
// OpenSSL for https base URLs.
class HttpTransport : public Transport {
 public:
  explicit HttpTransport(std::string base_url) {
    // Split "scheme://host[:port]/prefix" into client base and path prefix.
    const std::size_t scheme_end = base_url.find("://");
    std::size_t path_start = std::string::npos;
    if (scheme_end != std::string::npos) {
      path_start = base_url.find('/', scheme_end + 3);
    } else {
      path_start = base_url.find('/');
    }
    if (path_start == std::string::npos) {
      client_base_ = base_url;
    } else {
      client_base_ = base_url.substr(0, path_start);
      path_prefix_ = base_url.substr(path_start);
    }
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  }

  TransportReply post_chat(const Json& body, double timeout_seconds,
                           const std::string& bearer) override {
    httplib::Client client(client_base_);
    client.set_connection_timeout(std::chrono::duration<double>(
        std::min(timeout_seconds, 15.0)));
    client.set_read_timeout(std::chrono::duration<double>(timeout_seconds));
    client.set_write_timeout(std::chrono::duration<double>(timeout_seconds));
    httplib::Headers headers;
    if (!bearer.empty()) headers.emplace("Authorization", "Bearer " + bearer);

    const auto response = client.Post(path_prefix_ + "/chat/completions", headers,
                                      body.dump(), "application/json");
    TransportReply reply;
    if (!response) {
      reply.status = 0;
      reply.error = httplib::to_string(response.error());
      return reply;
    }
    reply.status = response->status;
    reply.body = response->body;
    return reply;
  }

 private:
  std::string client_base_;
  std::string path_prefix_;
};

}  // namespace avalon
