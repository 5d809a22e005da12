#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "followsim/wire.hpp"

namespace followsim {

struct NetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Blocking TCP connection with one wire message per framed write.
class TcpConnection {
 public:
  TcpConnection() = default;
  explicit TcpConnection(int fd) : fd_(fd) {}
  TcpConnection(TcpConnection&& other) noexcept;
  TcpConnection& operator=(TcpConnection&& other) noexcept;
  TcpConnection(const TcpConnection&) = delete;
  TcpConnection& operator=(const TcpConnection&) = delete;
  ~TcpConnection();

  static TcpConnection connect_to(const std::string& host, int port);

  void send_message(const WireMessage& m);
  WireMessage recv_message();  // FramingError on EOF/short read

  bool valid() const { return fd_ >= 0; }
  void close();

 private:
  void send_all(const std::uint8_t* data, std::size_t n);
  void recv_exact(std::uint8_t* out, std::size_t n);

  int fd_ = -1;
};

class TcpListener {
 public:
  TcpListener() = default;
  TcpListener(TcpListener&& other) noexcept;
  TcpListener& operator=(TcpListener&& other) noexcept;
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;
  ~TcpListener();

  // port 0 binds an ephemeral port; port() reports the actual one.
  static TcpListener bind_port(int port);

  TcpConnection accept_one();
  int port() const { return port_; }
  void close();

 private:
  int fd_ = -1;
  int port_ = 0;
};

}  // namespace followsim
