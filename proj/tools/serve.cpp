#include "serve.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <iostream>
#include <thread>

#include "lgs/session.hpp"

namespace lgsim {

namespace {

bool send_all(int fd, const std::string& s) {
  std::size_t off = 0;
  while (off < s.size()) {
    const ssize_t n = ::send(fd, s.data() + off, s.size() - off, MSG_NOSIGNAL);
    if (n <= 0) {
      if (n < 0 && errno == EINTR) continue;
      return false;
    }
    off += static_cast<std::size_t>(n);
  }
  return true;
}

void session_loop(int fd, ServeOptions opts) {
  lgs::Session session(opts.preset, opts.config);
  // Greet with the initial state so the client can render immediately.
  bool ok = send_all(fd, session.state_message() + "\n");
  std::string buf;
  char chunk[4096];
  while (ok) {
    const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    buf.append(chunk, static_cast<std::size_t>(n));
    std::size_t nl;
    while (ok && (nl = buf.find('\n')) != std::string::npos) {
      std::string line = buf.substr(0, nl);
      buf.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      for (const auto& reply : session.handle(line)) ok = ok && send_all(fd, reply + "\n");
    }
    if (buf.size() > (1u << 20)) {
      send_all(fd, R"({"type":"error","code":"bad_json","detail":"line too long"})"
                   "\n");
      break;
    }
  }
  ::close(fd);
}

}  // namespace

int serve(const ServeOptions& opts, std::atomic<bool>& stop, std::atomic<std::uint16_t>* bound_port) {
  const int lfd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (lfd < 0) {
    std::cerr << "serve: socket: " << std::strerror(errno) << "\n";
    return 3;
  }
  int one = 1;
  ::setsockopt(lfd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(opts.port);
  addr.sin_addr.s_addr = htonl(opts.loopback_only ? INADDR_LOOPBACK : INADDR_ANY);
  if (::bind(lfd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(lfd, 16) < 0) {
    std::cerr << "serve: port " << opts.port << ": " << std::strerror(errno) << "\n";
    ::close(lfd);
    return 3;
  }
  socklen_t len = sizeof addr;
  ::getsockname(lfd, reinterpret_cast<sockaddr*>(&addr), &len);
  if (bound_port) bound_port->store(ntohs(addr.sin_port));

  while (!stop.load()) {
    pollfd p{lfd, POLLIN, 0};
    const int r = ::poll(&p, 1, 200);
    if (r < 0 && errno != EINTR) break;
    if (r <= 0) continue;
    const int cfd = ::accept(lfd, nullptr, nullptr);
    if (cfd < 0) continue;
    std::thread(session_loop, cfd, opts).detach();
  }
  ::close(lfd);
  return 0;
}

}  // namespace lgsim
