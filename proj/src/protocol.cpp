#include "babagrid/protocol.hpp"

#include <cerrno>
#include <cstring>
#include <thread>

#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <sys/wait.h>
#include <unistd.h>

#include "babagrid/error.hpp"
#include "babagrid/io.hpp"
#include "babagrid/kernel_template.hpp"

extern char** environ;

namespace babagrid {

namespace {

constexpr std::string_view kKernelToken = "{kernel}";

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'') out += "'\\''";
    else out.push_back(ch);
  }
  return out + "'";
}

Error protocol_error(const std::string& label, const std::string& what) {
  return Error(ErrorKind::ProtocolError, label + ": " + what);
}

}  // namespace

EndpointSpec EndpointSpec::parse(std::string_view spec) {
  EndpointSpec out;
  if (spec.rfind("unix:", 0) == 0) {
    out.kind = Kind::Socket;
    out.target = std::string(spec.substr(5));
  } else if (spec.rfind("stdio:", 0) == 0) {
    out.target = std::string(spec.substr(6));
  } else {
    out.target = std::string(spec);
  }
  if (out.target.empty()) throw Error(ErrorKind::ProtocolError, "empty endpoint spec");
  return out;
}

bool EndpointSpec::takes_kernel() const {
  return kind == Kind::Process && target.find(kKernelToken) != std::string::npos;
}

std::string EndpointSpec::command_for(const std::filesystem::path& kernel_file) const {
  std::string cmd = target;
  const auto quoted = shell_quote(kernel_file.string());
  for (auto at = cmd.find(kKernelToken); at != std::string::npos; at = cmd.find(kKernelToken, at + quoted.size()))
    cmd.replace(at, kKernelToken.size(), quoted);
  return cmd;
}

std::string EndpointSpec::to_string() const { return (kind == Kind::Socket ? "unix:" : "stdio:") + target; }

KernelClient::KernelClient(int fd, int pid, std::chrono::milliseconds timeout, const AlphabetConfig& alphabet,
                           std::string label)
    : fd_(fd), pid_(pid), timeout_(timeout), alphabet_(&alphabet), label_(std::move(label)) {}

std::unique_ptr<KernelClient> KernelClient::open(const EndpointSpec& spec, const std::filesystem::path& kernel_file,
                                                 std::chrono::milliseconds timeout, const AlphabetConfig& alphabet) {
  if (spec.kind == EndpointSpec::Kind::Socket) {
    int fd = ::socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (fd < 0) throw protocol_error(spec.to_string(), std::strerror(errno));
    sockaddr_un addr{};
    addr.sun_family = AF_UNIX;
    if (spec.target.size() >= sizeof addr.sun_path) {
      ::close(fd);
      throw protocol_error(spec.to_string(), "socket path too long");
    }
    std::memcpy(addr.sun_path, spec.target.c_str(), spec.target.size() + 1);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
      int err = errno;
      ::close(fd);
      throw protocol_error(spec.to_string(), std::string("connect: ") + std::strerror(err));
    }
    return std::unique_ptr<KernelClient>(new KernelClient(fd, -1, timeout, alphabet, spec.to_string()));
  }

  if (spec.takes_kernel() && kernel_file.empty())
    throw protocol_error(spec.to_string(), "endpoint needs a kernel file");
  std::string command = spec.takes_kernel() ? spec.command_for(kernel_file) : spec.target;

  // A socketpair rather than pipes: writes use MSG_NOSIGNAL, so a dead
  // endpoint surfaces as an error instead of SIGPIPE.
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0)
    throw protocol_error(spec.to_string(), std::strerror(errno));
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, fds[1], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
  std::string exec_cmd = "exec " + command;
  const char* argv[] = {"/bin/sh", "-c", exec_cmd.c_str(), nullptr};
  pid_t pid = -1;
  int rc = ::posix_spawn(&pid, "/bin/sh", &actions, nullptr, const_cast<char**>(argv), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(fds[1]);
  if (rc != 0) {
    ::close(fds[0]);
    throw protocol_error(spec.to_string(), std::string("spawn: ") + std::strerror(rc));
  }
  return std::unique_ptr<KernelClient>(new KernelClient(fds[0], pid, timeout, alphabet, spec.to_string()));
}

KernelClient::~KernelClient() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
  }
  if (pid_ > 0) {
    // Give the endpoint a moment to exit on EOF before forcing it.
    for (int i = 0; i < 50; ++i) {
      if (::waitpid(pid_, nullptr, WNOHANG) == pid_) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(4));
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
  }
}

std::string KernelClient::read_line() {
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  while (true) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      broken_ = true;
      throw Error(ErrorKind::Timeout, label_ + ": no reply within " + std::to_string(timeout_.count()) + " ms");
    }
    pollfd p{fd_, POLLIN, 0};
    int rc = ::poll(&p, 1, static_cast<int>(left.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      broken_ = true;
      throw protocol_error(label_, std::string("poll: ") + std::strerror(errno));
    }
    if (rc == 0) continue;
    char chunk[4096];
    ssize_t n = ::read(fd_, chunk, sizeof chunk);
    if (n < 0 && (errno == EINTR || errno == EAGAIN)) continue;
    if (n <= 0) {
      broken_ = true;
      throw protocol_error(label_, "endpoint closed the connection");
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

nlohmann::json KernelClient::call(const nlohmann::json& request) {
  std::lock_guard lock(mutex_);
  if (broken_) throw protocol_error(label_, "connection unusable after an earlier failure");
  std::string line = request.dump() + "\n";
  std::size_t sent = 0;
  while (sent < line.size()) {
    ssize_t n = ::send(fd_, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      broken_ = true;
      throw protocol_error(label_, "write failed");
    }
    sent += static_cast<std::size_t>(n);
  }
  ++calls_;
  auto reply_text = read_line();
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(reply_text);
  } catch (const nlohmann::json::exception&) {
    throw protocol_error(label_, "malformed reply: " + reply_text.substr(0, 200));
  }
  if (!reply.is_object()) throw protocol_error(label_, "reply is not an object");
  if (reply.contains("ok") && reply["ok"] == false)
    throw protocol_error(label_, "endpoint error: " + reply.value("error", std::string("unspecified")));
  return reply;
}

void KernelClient::reset(const GridState& g, const RuleSet& rules) {
  auto reply = call({{"op", "reset"}, {"grid", encode_ascii(g, *alphabet_)}, {"rules", rules.to_strings()}});
  if (reply.value("ok", false) != true) throw protocol_error(label_, "reset not acknowledged");
}

GridState KernelClient::next_state(const GridState& g, Action a) {
  auto reply =
      call({{"op", "next_state"}, {"grid", encode_ascii(g, *alphabet_)}, {"action", std::string(action_name(a))}});
  if (!reply.contains("grid") || !reply["grid"].is_string()) throw protocol_error(label_, "reply lacks a grid");
  try {
    return parse_ascii(reply["grid"].get<std::string>(), *alphabet_);
  } catch (const Error& e) {
    throw protocol_error(label_, std::string("bad grid in reply: ") + e.what());
  }
}

bool KernelClient::check_win(const GridState& g) {
  auto reply = call({{"op", "check_win"}, {"grid", encode_ascii(g, *alphabet_)}});
  if (!reply.contains("win") || !reply["win"].is_boolean()) throw protocol_error(label_, "reply lacks 'win'");
  return reply["win"].get<bool>();
}

KernelCache::Synthesizer external_synthesizer(EndpointSpec spec, std::shared_ptr<const KernelTemplate> tmpl,
                                              DynamicsConfig cfg, std::filesystem::path work_dir,
                                              std::chrono::milliseconds timeout) {
  return [spec = std::move(spec), tmpl = std::move(tmpl), cfg = std::move(cfg), work_dir = std::move(work_dir),
          timeout](const RuleSignature& sig, const RuleSet& rules, const GridState& context) {
    std::filesystem::path kernel_file;
    if (spec.takes_kernel()) {
      if (!tmpl) throw Error(ErrorKind::SynthesisFailure, "kernel endpoint without a template");
      kernel_file = work_dir / ("kernel-" + sig.hex() + ".py");
      write_file_atomic(kernel_file, render_kernel(*tmpl, rules, cfg));
    }
    auto client = KernelClient::open(spec, kernel_file, timeout, cfg.alpha());
    client->reset(context, rules);
    return std::shared_ptr<TransitionOracle>(std::make_shared<ExternalOracle>(std::move(client)));
  };
}

}  // namespace babagrid
