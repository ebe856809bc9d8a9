#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "pctagent/wire.hpp"

namespace pct::wire {

class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Stream over a pair of POSIX file descriptors. Owns them when `owned`.
class FdStream : public Stream {
public:
    FdStream(int read_fd, int write_fd, bool owned);
    ~FdStream() override;
    FdStream(const FdStream&) = delete;
    FdStream& operator=(const FdStream&) = delete;

    std::size_t read_exact(std::span<std::uint8_t> out) override;
    void write_all(std::span<const std::uint8_t> data) override;

private:
    int read_fd_;
    int write_fd_;
    bool owned_;
};

struct Endpoint {
    std::string host;
    std::uint16_t port = 0;

    // Parses "host:port"; throws std::invalid_argument.
    static Endpoint parse(const std::string& text);
};

// Listening TCP socket accepting one peer at a time.
class TcpListener {
public:
    explicit TcpListener(const Endpoint& ep);
    ~TcpListener();
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    [[nodiscard]] std::uint16_t port() const { return port_; }
    std::unique_ptr<Stream> accept();

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

std::unique_ptr<Stream> tcp_connect(const Endpoint& ep);

// stdin/stdout, not owned.
std::unique_ptr<Stream> stdio_stream();

}  // namespace pct::wire
