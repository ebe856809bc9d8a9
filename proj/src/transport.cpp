#include "pctagent/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <csignal>
#include <cstring>

namespace pct::wire {

namespace {

[[noreturn]] void fail(const std::string& what) { throw TransportError(what + ": " + std::strerror(errno)); }

void ignore_sigpipe() {
    static const bool once = [] {
        std::signal(SIGPIPE, SIG_IGN);
        return true;
    }();
    (void)once;
}

}  // namespace

FdStream::FdStream(int read_fd, int write_fd, bool owned) : read_fd_(read_fd), write_fd_(write_fd), owned_(owned) {
    ignore_sigpipe();
}

FdStream::~FdStream() {
    if (!owned_) return;
    ::close(read_fd_);
    if (write_fd_ != read_fd_) ::close(write_fd_);
}

std::size_t FdStream::read_exact(std::span<std::uint8_t> out) {
    std::size_t done = 0;
    while (done < out.size()) {
        const ssize_t n = ::read(read_fd_, out.data() + done, out.size() - done);
        if (n == 0) break;
        if (n < 0) {
            if (errno == EINTR) continue;
            if (errno == ECONNRESET) break;
            fail("read");
        }
        done += static_cast<std::size_t>(n);
    }
    return done;
}

void FdStream::write_all(std::span<const std::uint8_t> data) {
    std::size_t done = 0;
    while (done < data.size()) {
        const ssize_t n = ::write(write_fd_, data.data() + done, data.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            fail("write");
        }
        done += static_cast<std::size_t>(n);
    }
}

Endpoint Endpoint::parse(const std::string& text) {
    const auto colon = text.rfind(':');
    if (colon == std::string::npos || colon + 1 == text.size()) {
        throw std::invalid_argument("endpoint must be host:port, got '" + text + "'");
    }
    Endpoint ep;
    ep.host = text.substr(0, colon);
    if (ep.host.empty()) ep.host = "0.0.0.0";
    std::size_t used = 0;
    int port = 0;
    try {
        port = std::stoi(text.substr(colon + 1), &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() - colon - 1 || port < 0 || port > 65535) {
        throw std::invalid_argument("invalid port in '" + text + "'");
    }
    ep.port = static_cast<std::uint16_t>(port);
    return ep;
}

namespace {

sockaddr_in resolve(const Endpoint& ep) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (::getaddrinfo(ep.host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
        throw TransportError("cannot resolve host '" + ep.host + "'");
    }
    sockaddr_in addr{};
    std::memcpy(&addr, res->ai_addr, sizeof addr);
    ::freeaddrinfo(res);
    addr.sin_port = htons(ep.port);
    return addr;
}

void set_nodelay(int fd) {
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

}  // namespace

TcpListener::TcpListener(const Endpoint& ep) {
    ignore_sigpipe();
    const sockaddr_in addr = resolve(ep);
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) fail("socket");
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) < 0) {
        ::close(fd_);
        fail("bind " + ep.host + ":" + std::to_string(ep.port));
    }
    if (::listen(fd_, 1) < 0) {
        ::close(fd_);
        fail("listen");
    }
    sockaddr_in bound{};
    socklen_t len = sizeof bound;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.sin_port);
}

TcpListener::~TcpListener() {
    if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Stream> TcpListener::accept() {
    int c;
    do {
        c = ::accept(fd_, nullptr, nullptr);
    } while (c < 0 && errno == EINTR);
    if (c < 0) fail("accept");
    set_nodelay(c);
    return std::make_unique<FdStream>(c, c, true);
}

std::unique_ptr<Stream> tcp_connect(const Endpoint& ep) {
    ignore_sigpipe();
    const sockaddr_in addr = resolve(ep);
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) fail("socket");
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) < 0) {
        ::close(fd);
        fail("connect " + ep.host + ":" + std::to_string(ep.port));
    }
    set_nodelay(fd);
    return std::make_unique<FdStream>(fd, fd, true);
}

std::unique_ptr<Stream> stdio_stream() { return std::make_unique<FdStream>(STDIN_FILENO, STDOUT_FILENO, false); }

}  // namespace pct::wire
