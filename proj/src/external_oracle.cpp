#include "surfmax/external_oracle.hpp"

#include <cerrno>
#include <cstring>
#include <mutex>
#include <string>
#include <thread>

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

#include "surfmax/error.hpp"

namespace surfmax {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string errno_text() { return std::strerror(errno); }

// Newline-framed byte stream over a connected socket. Owns the descriptor and,
// for child-process transports, the child.
class LineChannel {
 public:
  LineChannel(int fd, pid_t child) : fd_(fd), child_(child) {}
  LineChannel(const LineChannel&) = delete;
  LineChannel& operator=(const LineChannel&) = delete;

  ~LineChannel() {
    if (fd_ >= 0) ::close(fd_);
    if (child_ > 0) reap_child();
  }

  void write_line(const std::string& line) {
    const std::string framed = line + "\n";
    std::size_t sent = 0;
    while (sent < framed.size()) {
      const ssize_t n = ::send(fd_, framed.data() + sent, framed.size() - sent, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorKind::OracleUnavailable, "write to oracle peer failed: " + errno_text());
      }
      sent += static_cast<std::size_t>(n);
    }
  }

  std::string read_line(Clock::time_point deadline) {
    for (;;) {
      const auto newline = buffer_.find('\n');
      if (newline != std::string::npos) {
        std::string line = buffer_.substr(0, newline);
        buffer_.erase(0, newline + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      const auto remaining =
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
      if (remaining <= 0) throw Error(ErrorKind::OracleUnavailable, "oracle peer timed out");
      pollfd pfd{fd_, POLLIN, 0};
      const int ready = ::poll(&pfd, 1, static_cast<int>(remaining));
      if (ready < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorKind::OracleUnavailable, "poll on oracle peer failed: " + errno_text());
      }
      if (ready == 0) throw Error(ErrorKind::OracleUnavailable, "oracle peer timed out");
      char chunk[4096];
      const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorKind::OracleUnavailable, "read from oracle peer failed: " + errno_text());
      }
      if (n == 0) throw Error(ErrorKind::OracleUnavailable, "oracle peer closed the connection");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  void reap_child() {
    for (int i = 0; i < 200; ++i) {
      if (::waitpid(child_, nullptr, WNOHANG) != 0) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    // The peer may run under a shell; take down the whole process group.
    ::kill(-child_, SIGKILL);
    ::waitpid(child_, nullptr, 0);
  }

  int fd_;
  pid_t child_;
  std::string buffer_;
};

std::unique_ptr<LineChannel> spawn_command(const std::string& command) {
  int sv[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0) {
    throw Error(ErrorKind::OracleUnavailable, "socketpair failed: " + errno_text());
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(sv[0]);
    ::close(sv[1]);
    throw Error(ErrorKind::OracleUnavailable, "fork failed: " + errno_text());
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(sv[1], STDIN_FILENO);
    ::dup2(sv[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(sv[1]);
  return std::make_unique<LineChannel>(sv[0], pid);
}

std::unique_ptr<LineChannel> connect_tcp(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw Error(ErrorKind::Config, "tcp target must look like tcp:HOST:PORT, got tcp:" + address);
  }
  const std::string host = address.substr(0, colon);
  const std::string port = address.substr(colon + 1);

  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  if (const int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &found); rc != 0) {
    throw Error(ErrorKind::OracleUnavailable, "cannot resolve " + address + ": " + ::gai_strerror(rc));
  }
  int fd = -1;
  for (addrinfo* ai = found; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(found);
  if (fd < 0) throw Error(ErrorKind::OracleUnavailable, "cannot connect to " + address);
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return std::make_unique<LineChannel>(fd, -1);
}

json parse_reply(const std::string& line) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Protocol, "malformed reply from oracle peer: " + std::string(e.what()));
  }
}

class ExternalOracle final : public LossOracle {
 public:
  ExternalOracle(std::unique_ptr<LineChannel> channel, Eigen::Index dim, ExternalOracleOptions options)
      : channel_(std::move(channel)), dim_(dim), options_(options) {
    json hello = call(json{{"op", "hello"}, {"dim", dim}}, /*expect_id=*/false);
    if (!hello.is_object() || hello.value("op", "") != "hello") {
      throw Error(ErrorKind::Protocol, "peer did not answer the hello handshake");
    }
    if (!hello.contains("dim") || !hello["dim"].is_number_integer() ||
        hello["dim"].get<Eigen::Index>() != dim) {
      throw Error(ErrorKind::Protocol, "peer reports dim " + hello.value("dim", json()).dump() +
                                           ", expected " + std::to_string(dim));
    }
    has_grad_ = hello.value("grad", false);
  }

  Eigen::Index dim() const override { return dim_; }

  double eval(const LatentVector& z) override {
    check_dimension(*this, z, "external eval");
    const json reply = call(request("eval", z), true);
    if (!reply.contains("value") || !reply["value"].is_number()) {
      throw Error(ErrorKind::Protocol, "eval reply lacks a numeric value");
    }
    return reply["value"].get<double>();
  }

  bool has_gradient() const override { return has_grad_; }

  LatentVector grad(const LatentVector& z) override {
    if (!has_grad_) return LossOracle::grad(z);
    check_dimension(*this, z, "external grad");
    const json reply = call(request("grad", z), true);
    if (!reply.contains("grad") || !reply["grad"].is_array() ||
        reply["grad"].size() != static_cast<std::size_t>(dim_)) {
      throw Error(ErrorKind::Protocol, "grad reply lacks a gradient of dimension " + std::to_string(dim_));
    }
    LatentVector g(dim_);
    for (Eigen::Index i = 0; i < dim_; ++i) {
      const json& v = reply["grad"][static_cast<std::size_t>(i)];
      if (!v.is_number()) throw Error(ErrorKind::Protocol, "grad reply holds a non-number");
      g[i] = v.get<double>();
    }
    return g;
  }

 private:
  json request(const char* op, const LatentVector& z) {
    json req{{"id", next_id_++}, {"op", op}};
    req["z"] = std::vector<double>(z.data(), z.data() + z.size());
    return req;
  }

  json call(const json& req, bool expect_id) {
    std::lock_guard lock(mutex_);
    if (broken_) throw Error(ErrorKind::OracleUnavailable, "connection to oracle peer is no longer usable");
    try {
      channel_->write_line(req.dump());
      json reply = parse_reply(channel_->read_line(Clock::now() + options_.call_timeout));
      if (expect_id && (!reply.is_object() || reply.value("id", json()) != req["id"])) {
        throw Error(ErrorKind::Protocol, "reply id does not echo request id " + req["id"].dump());
      }
      if (reply.is_object() && reply.contains("error")) {
        const json& msg = reply["error"];
        throw Error(ErrorKind::OracleFailure, "peer error: " + (msg.is_string() ? msg.get<std::string>() : msg.dump()));
      }
      return reply;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::OracleFailure) broken_ = true;
      throw;
    }
  }

  std::unique_ptr<LineChannel> channel_;
  Eigen::Index dim_;
  ExternalOracleOptions options_;
  bool has_grad_ = false;
  bool broken_ = false;
  std::int64_t next_id_ = 1;
  std::mutex mutex_;
};

}  // namespace

std::unique_ptr<LossOracle> external_oracle_connect(const std::string& target, Eigen::Index dim,
                                                    const ExternalOracleOptions& options) {
  if (dim < 2) throw Error(ErrorKind::Dimension, "external oracle dimension must be >= 2");
  if (target.empty()) throw Error(ErrorKind::Config, "external oracle target is empty");
  std::unique_ptr<LineChannel> channel =
      target.rfind("tcp:", 0) == 0 ? connect_tcp(target.substr(4)) : spawn_command(target);
  return std::make_unique<ExternalOracle>(std::move(channel), dim, options);
}

}  // namespace surfmax
