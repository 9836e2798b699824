#include "mpstego/errors.hpp"
#include "mpstego/transport.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <cstring>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

namespace mpstego {

namespace {

sockaddr_in resolve(const std::string& host, std::uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_DGRAM;
    addrinfo* res = nullptr;
    const int rc = ::getaddrinfo(host.c_str(), nullptr, &hints, &res);
    if (rc != 0 || res == nullptr) {
        throw IoError("cannot resolve '" + host + "': " + ::gai_strerror(rc));
    }
    sockaddr_in addr{};
    std::memcpy(&addr, res->ai_addr, sizeof(addr));
    ::freeaddrinfo(res);
    addr.sin_port = htons(port);
    return addr;
}

[[noreturn]] void fail(const std::string& what) {
    throw IoError(what + ": " + std::strerror(errno));
}

} // namespace

UdpChannel::UdpChannel(const std::string& bind_host, std::uint16_t bind_port,
                       const std::string& peer_host, std::uint16_t peer_port, LossModel model)
    : link_(model) {
    fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) fail("socket");
    const sockaddr_in local = resolve(bind_host, bind_port);
    if (::bind(fd_, reinterpret_cast<const sockaddr*>(&local), sizeof(local)) != 0) {
        const int err = errno;
        ::close(fd_);
        fd_ = -1;
        errno = err;
        fail("bind " + bind_host + ":" + std::to_string(bind_port));
    }
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    local_port_ = ntohs(bound.sin_port);

    if (peer_host.empty()) {
        return; // peer learned from the first datagram
    }
    const sockaddr_in peer = resolve(peer_host, peer_port);
    std::memcpy(&peer_, &peer, sizeof(peer));
    has_peer_ = true;
    if (::connect(fd_, reinterpret_cast<const sockaddr*>(&peer), sizeof(peer)) != 0) {
        const int err = errno;
        ::close(fd_);
        fd_ = -1;
        errno = err;
        fail("connect " + peer_host + ":" + std::to_string(peer_port));
    }
    connected_ = true;
}

UdpChannel::~UdpChannel() { close(); }

void UdpChannel::send(std::vector<std::uint8_t> datagram) {
    std::lock_guard lock(mu_);
    if (fd_ < 0) throw ChannelClosedError("send on closed UDP channel");
    if (!has_peer_) throw IoError("UDP channel has no peer yet");
    for (const auto& d : link_.transmit(std::move(datagram))) {
        const ssize_t rc = connected_ ? ::send(fd_, d.data(), d.size(), 0)
                                      : ::sendto(fd_, d.data(), d.size(), 0,
                                                 reinterpret_cast<const sockaddr*>(&peer_),
                                                 sizeof(sockaddr_in));
        if (rc < 0) {
            // The peer may not be listening yet; ICMP refusals are not fatal.
            if (errno == ECONNREFUSED) continue;
            fail("send");
        }
    }
}

std::optional<std::vector<std::uint8_t>> UdpChannel::recv(std::chrono::milliseconds timeout) {
    int fd;
    {
        std::lock_guard lock(mu_);
        fd = fd_;
    }
    if (fd < 0) throw ChannelClosedError("receive on closed UDP channel");
    pollfd p{fd, POLLIN, 0};
    const int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
    if (rc < 0) {
        if (errno == EINTR) return std::nullopt;
        fail("poll");
    }
    if (rc == 0) return std::nullopt;
    std::vector<std::uint8_t> buf(65536);
    sockaddr_in from{};
    socklen_t from_len = sizeof(from);
    const ssize_t n =
        ::recvfrom(fd, buf.data(), buf.size(), 0, reinterpret_cast<sockaddr*>(&from), &from_len);
    if (n < 0) {
        if (errno == ECONNREFUSED || errno == EAGAIN) return std::nullopt;
        fail("recv");
    }
    buf.resize(static_cast<std::size_t>(n));
    {
        std::lock_guard lock(mu_);
        if (!connected_) {
            std::memcpy(&peer_, &from, sizeof(from));
            has_peer_ = true;
        }
    }
    return buf;
}

void UdpChannel::close() {
    std::lock_guard lock(mu_);
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

std::size_t UdpChannel::dropped() const {
    std::lock_guard lock(mu_);
    return link_.dropped();
}

} // namespace mpstego
