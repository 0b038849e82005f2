#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>

#include "babagrid/oracle.hpp"
#include "babagrid/planner.hpp"
#include "json.hpp"

namespace babagrid {

inline constexpr std::chrono::milliseconds kDefaultCallTimeout{2000};

// Where a kernel endpoint lives:
//   "unix:<path>"           connect to a listening local socket
//   "stdio:<command>"       spawn `command` via /bin/sh and talk over its stdin/stdout
//   "<command>"             same as stdio:
// A "{kernel}" token in a command is replaced by the path of a rendered kernel
// source file, so one endpoint process serves one synthesized kernel.
struct EndpointSpec {
  enum class Kind { Process, Socket };
  Kind kind = Kind::Process;
  std::string target;  // command line or socket path

  static EndpointSpec parse(std::string_view spec);
  bool takes_kernel() const;
  // Command with {kernel} replaced; the quoted path is shell-safe.
  std::string command_for(const std::filesystem::path& kernel_file) const;
  std::string to_string() const;
};

// One connection speaking the line-delimited kernel protocol. Calls are
// serialized; a timed-out or closed connection stays broken.
class KernelClient {
 public:
  static std::unique_ptr<KernelClient> open(const EndpointSpec& spec, const std::filesystem::path& kernel_file = {},
                                            std::chrono::milliseconds timeout = kDefaultCallTimeout,
                                            const AlphabetConfig& alphabet = AlphabetConfig::standard());
  ~KernelClient();
  KernelClient(const KernelClient&) = delete;
  KernelClient& operator=(const KernelClient&) = delete;

  // Sends one request line and returns the parsed response line. An
  // {"ok":false} reply throws ProtocolError; silence past the timeout throws
  // Timeout.
  nlohmann::json call(const nlohmann::json& request);

  void reset(const GridState& g, const RuleSet& rules);
  GridState next_state(const GridState& g, Action a);
  bool check_win(const GridState& g);

  std::size_t calls() const noexcept { return calls_; }

 private:
  KernelClient(int fd, int pid, std::chrono::milliseconds timeout, const AlphabetConfig& alphabet, std::string label);
  std::string read_line();

  int fd_ = -1;
  int pid_ = -1;
  std::chrono::milliseconds timeout_;
  const AlphabetConfig* alphabet_;
  std::string label_;
  std::string buffer_;
  bool broken_ = false;
  std::size_t calls_ = 0;
  std::mutex mutex_;
};

// Transition oracle answered by an external kernel endpoint.
class ExternalOracle final : public TransitionOracle {
 public:
  explicit ExternalOracle(std::unique_ptr<KernelClient> client) : client_(std::move(client)) {}
  GridState next_state(const GridState& g, Action a) override { return client_->next_state(g, a); }
  bool check_win(const GridState& g) override { return client_->check_win(g); }
  Provenance provenance() const override { return Provenance::ExternalKernel; }
  KernelClient& client() { return *client_; }

 private:
  std::unique_ptr<KernelClient> client_;
};

class KernelTemplate;

// Synthesizer backed by an endpoint. With a {kernel} endpoint, each signature
// gets the template rendered for its rules, written under work_dir, and its own
// process. Otherwise the endpoint is opened and told the rules via reset.
KernelCache::Synthesizer external_synthesizer(EndpointSpec spec, std::shared_ptr<const KernelTemplate> tmpl,
                                              DynamicsConfig cfg, std::filesystem::path work_dir,
                                              std::chrono::milliseconds timeout = kDefaultCallTimeout);

}  // namespace babagrid
