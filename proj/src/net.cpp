#include "followsim/net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace followsim {

namespace {

std::string errno_text() { return std::strerror(errno); }

}  // namespace

TcpConnection::TcpConnection(TcpConnection&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

TcpConnection& TcpConnection::operator=(TcpConnection&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = other.fd_;
    other.fd_ = -1;
  }
  return *this;
}

TcpConnection::~TcpConnection() { close(); }

void TcpConnection::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

TcpConnection TcpConnection::connect_to(const std::string& host, int port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string port_str = std::to_string(port);
  const int rc = ::getaddrinfo(host.c_str(), port_str.c_str(), &hints, &res);
  if (rc != 0) {
    throw NetError("cannot resolve " + host + ": " + gai_strerror(rc));
  }
  int fd = -1;
  std::string last_err = "no addresses";
  for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) {
      last_err = errno_text();
      continue;
    }
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    last_err = errno_text();
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) {
    throw NetError("cannot connect to " + host + ":" + port_str + ": " + last_err);
  }
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return TcpConnection(fd);
}

void TcpConnection::send_all(const std::uint8_t* data, std::size_t n) {
  std::size_t sent = 0;
  while (sent < n) {
    const ssize_t rc = ::send(fd_, data + sent, n - sent, MSG_NOSIGNAL);
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw FramingError("send failed: " + errno_text());
    }
    sent += static_cast<std::size_t>(rc);
  }
}

void TcpConnection::recv_exact(std::uint8_t* out, std::size_t n) {
  std::size_t got = 0;
  while (got < n) {
    const ssize_t rc = ::recv(fd_, out + got, n - got, 0);
    if (rc == 0) {
      throw FramingError("connection closed: expected " + std::to_string(n) + " bytes, got " +
                         std::to_string(got));
    }
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw FramingError("recv failed: " + errno_text());
    }
    got += static_cast<std::size_t>(rc);
  }
}

void TcpConnection::send_message(const WireMessage& m) {
  const std::vector<std::uint8_t> bytes = encode_message(m);
  send_all(bytes.data(), bytes.size());
}

WireMessage TcpConnection::recv_message() {
  std::uint8_t prefix[4];
  recv_exact(prefix, 4);
  const std::uint32_t n = (static_cast<std::uint32_t>(prefix[0]) << 24) |
                          (static_cast<std::uint32_t>(prefix[1]) << 16) |
                          (static_cast<std::uint32_t>(prefix[2]) << 8) |
                          static_cast<std::uint32_t>(prefix[3]);
  if (n > kMaxPayloadBytes) throw ProtocolError("payload exceeds 2^24 bytes");
  std::vector<std::uint8_t> frame(4 + n);
  std::memcpy(frame.data(), prefix, 4);
  recv_exact(frame.data() + 4, n);
  return decode_message(frame.data(), frame.size());
}

TcpListener::TcpListener(TcpListener&& other) noexcept : fd_(other.fd_), port_(other.port_) {
  other.fd_ = -1;
  other.port_ = 0;
}

TcpListener& TcpListener::operator=(TcpListener&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = other.fd_;
    port_ = other.port_;
    other.fd_ = -1;
    other.port_ = 0;
  }
  return *this;
}

TcpListener::~TcpListener() { close(); }

void TcpListener::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

TcpListener TcpListener::bind_port(int port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw NetError("cannot create socket: " + errno_text());
  const int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_ANY);
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    const std::string err = errno_text();
    ::close(fd);
    throw NetError("cannot bind port " + std::to_string(port) + ": " + err);
  }
  if (::listen(fd, 8) != 0) {
    const std::string err = errno_text();
    ::close(fd);
    throw NetError("cannot listen: " + err);
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len);
  TcpListener l;
  l.fd_ = fd;
  l.port_ = ntohs(bound.sin_port);
  return l;
}

TcpConnection TcpListener::accept_one() {
  const int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) {
    // EINTR surfaces so a signal can stop a serving loop.
    throw NetError("accept failed: " + errno_text());
  }
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return TcpConnection(fd);
}

}  // namespace followsim
