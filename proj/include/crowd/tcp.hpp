#pragma once

// Loopback TCP runtime. The same Coordinator state machine is driven by real
// sockets and wall-clock time: one reader thread per connection feeds a single
// coordinator loop, and each worker is a thread running the workload for real.
// Simulated costs (dispatch overhead, checkpoint setup, per-item cost) do not
// apply here; compute takes however long it takes.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "crowd/coordinator.hpp"
#include "crowd/error.hpp"
#include "crowd/fleet.hpp"
#include "crowd/random.hpp"
#include "crowd/simulation.hpp"
#include "crowd/transport.hpp"
#include "crowd/workloads.hpp"

namespace crowd::tcp {

using transport::Message;

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Socket& operator=(Socket&& o) noexcept {
    if (this != &o) {
      close();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() { close(); }

  int fd() const noexcept { return fd_; }
  bool valid() const noexcept { return fd_ >= 0; }
  void close() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }
  /// Wakes any thread blocked in recv on this socket without releasing the fd.
  void shutdown() const {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
  }

 private:
  int fd_ = -1;
};

inline bool send_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    off += std::size_t(n);
  }
  return true;
}

inline Socket listen_loopback(std::uint16_t port, std::uint16_t& bound_port) {
  Socket s(::socket(AF_INET, SOCK_STREAM, 0));
  if (!s.valid()) fail(ErrorCode::IoError, std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(s.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    fail(ErrorCode::IoError, "bind 127.0.0.1:" + std::to_string(port) + ": " + std::strerror(errno));
  }
  if (::listen(s.fd(), 64) != 0) fail(ErrorCode::IoError, std::string("listen: ") + std::strerror(errno));
  socklen_t len = sizeof addr;
  ::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&addr), &len);
  bound_port = ntohs(addr.sin_port);
  return s;
}

inline Socket connect_loopback(std::uint16_t port) {
  Socket s(::socket(AF_INET, SOCK_STREAM, 0));
  if (!s.valid()) fail(ErrorCode::IoError, std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::connect(s.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    fail(ErrorCode::IoError, "connect 127.0.0.1:" + std::to_string(port) + ": " + std::strerror(errno));
  }
  return s;
}

struct TcpOptions {
  std::uint16_t port = 0;  // 0 picks a free port
  /// Items a worker computes between checks of its socket.
  std::uint64_t chunk_items = 4096;
  double wall_timeout_s = 120.0;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Inbound {
  std::size_t conn;
  std::optional<Message> msg;  // empty: connection closed or unreadable
};

class Inbox {
 public:
  void push(Inbound in) {
    {
      std::lock_guard lock(mu_);
      items_.push_back(std::move(in));
    }
    cv_.notify_one();
  }

  std::optional<Inbound> pop_for(double seconds) {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, std::chrono::duration<double>(seconds), [&] { return !items_.empty(); });
    if (items_.empty()) return std::nullopt;
    Inbound in = std::move(items_.front());
    items_.pop_front();
    return in;
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Inbound> items_;
};

/// Reads frames until the peer closes; malformed input ends the connection.
inline void read_connection(int fd, std::size_t conn, Inbox& inbox) {
  transport::FrameReader reader;
  char buf[65536];
  try {
    for (;;) {
      const ssize_t n = ::recv(fd, buf, sizeof buf, 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) break;
      reader.feed(std::string_view(buf, std::size_t(n)));
      while (auto msg = reader.next()) inbox.push({conn, std::move(*msg)});
    }
  } catch (const Error&) {
  }
  inbox.push({conn, std::nullopt});
}

/// One worker agent. Connects, registers, executes assignments, and follows
/// its churn schedule by dropping and re-opening the connection.
class WorkerAgent {
 public:
  WorkerAgent(fleet::DeviceProfile profile, const workloads::ResumableTask& workload,
              const coordinator::JobSpec& job, const sim::SimulationConfig& config, const TcpOptions& options,
              std::uint16_t port, std::size_t index, std::vector<fleet::ChurnEvent> churn,
              const std::atomic<bool>& stop, const std::atomic<double>& submit_at)
      : profile_(std::move(profile)),
        workload_(workload),
        job_(job),
        config_(config),
        options_(options),
        port_(port),
        rng_(make_rng(job.seed, 100 + index)),
        telemetry_(fleet::initial_snapshot(profile_, config.telemetry)),
        outbox_(profile_.id),
        churn_(std::move(churn)),
        stop_(stop),
        submit_at_(submit_at) {}

  /// Connects and registers; returns once the coordinator acknowledged.
  void register_now(detail::Clock::time_point t0) {
    t0_ = t0;
    open_and_register();
  }

  void run() {
    last_beat_ = now();
    while (!stop_) {
      if (!apply_churn()) continue;
      if (!socket_.valid()) break;
      if (task_) {
        step_task();
        if (!drain(0)) break;
      } else if (!drain(50)) {
        break;
      }
      beat();
    }
    socket_.close();
  }

 private:
  double now() const { return seconds_since(t0_); }

  void send(transport::Body body) {
    if (socket_.valid()) send_all(socket_.fd(), transport::encode(outbox_.make(std::move(body))));
  }

  void open_and_register() {
    socket_ = connect_loopback(port_);
    reader_ = transport::FrameReader();
    send(transport::RegisterBody{profile_.cores, profile_.freq_ghz, profile_.ram_gb});
    // Block until the Ack so registration order follows start order.
    for (;;) {
      auto msg = read_one(-1);
      if (!msg) fail(ErrorCode::IoError, profile_.id + " lost its connection while registering");
      if (msg->type() == transport::MessageType::Ack) break;
      handle(*msg);
    }
    send(telemetry_body());
  }

  transport::TelemetryBody telemetry_body() const {
    const auto& s = telemetry_;
    return {s.cpu_util, s.free_mem_gb, s.battery, s.latency_ms, s.thermal, s.timestamp_s};
  }

  /// Returns false while offline (the loop sleeps and retries).
  bool apply_churn() {
    const double submit = submit_at_.load();
    if (submit < 0.0 || churn_.empty()) return true;
    const double t = now() - submit;
    while (!churn_.empty() && churn_.front().at_s <= t) {
      const auto ev = churn_.front();
      churn_.erase(churn_.begin());
      if (ev.kind == fleet::ChurnKind::Disconnect && socket_.valid()) {
        socket_.close();
        task_.reset();
        offline_ = true;
      } else if (ev.kind == fleet::ChurnKind::Reconnect && offline_) {
        offline_ = false;
        open_and_register();
      }
    }
    if (offline_) {
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
      return false;
    }
    return true;
  }

  void beat() {
    const double interval = config_.coordinator.heartbeat_interval_s;
    if (now() - last_beat_ < interval) return;
    last_beat_ = now();
    telemetry_ = fleet::step_telemetry(profile_, telemetry_, interval, rng_, config_.telemetry);
    // Telemetry doubles as the heartbeat on a reliable stream.
    send(telemetry_body());
  }

  void step_task() {
    auto& t = *task_;
    const std::uint64_t budget = std::min(options_.chunk_items, workload_.remaining(t.state));
    if (budget > 0) workload_.run_slice(t.state, budget);
    if (workload_.remaining(t.state) == 0) {
      send(transport::CommitResultBody{t.id, workload_.finalize(t.state)});
      task_.reset();
      return;
    }
    if (job_.checkpoint.enabled && now() - t.last_checkpoint >= job_.checkpoint.interval_s) {
      t.last_checkpoint = now();
      send(transport::CheckpointUploadBody{t.id, t.state.cursor, t.state.vars});
    }
  }

  std::optional<Message> read_one(int timeout_ms) {
    for (;;) {
      if (auto msg = reader_.next()) return msg;
      pollfd p{socket_.fd(), POLLIN, 0};
      const int r = ::poll(&p, 1, timeout_ms);
      if (r < 0 && errno == EINTR) continue;
      if (r == 0) return std::nullopt;
      char buf[65536];
      const ssize_t n = ::recv(socket_.fd(), buf, sizeof buf, 0);
      if (n <= 0) {
        socket_.close();
        return std::nullopt;
      }
      reader_.feed(std::string_view(buf, std::size_t(n)));
      timeout_ms = 0;
    }
  }

  /// Processes everything pending; false once the coordinator hung up.
  bool drain(int timeout_ms) {
    while (socket_.valid()) {
      auto msg = read_one(timeout_ms);
      if (!msg) break;
      handle(*msg);
      timeout_ms = 0;
    }
    return socket_.valid() || offline_;
  }

  void handle(const Message& msg) {
    switch (msg.type()) {
      case transport::MessageType::AssignTask: {
        const auto& body = msg.as<transport::AssignTaskBody>();
        checkpoint::TaskState state =
            body.vars.empty() ? workload_.init(body.slice) : checkpoint::TaskState{body.vars, body.start_cursor};
        task_ = Running{body.task_id, std::move(state), now()};
        break;
      }
      case transport::MessageType::Reject: {
        const auto& rej = msg.as<transport::RejectBody>();
        if (!rej.task_id) {
          task_.reset();
          send(transport::RegisterBody{profile_.cores, profile_.freq_ghz, profile_.ram_gb});
        } else if (task_ && task_->id == *rej.task_id) {
          task_.reset();
        }
        break;
      }
      default: break;
    }
  }

  struct Running {
    std::uint64_t id;
    checkpoint::TaskState state;
    double last_checkpoint;
  };

  fleet::DeviceProfile profile_;
  const workloads::ResumableTask& workload_;
  const coordinator::JobSpec& job_;
  const sim::SimulationConfig& config_;
  const TcpOptions& options_;
  std::uint16_t port_;
  Rng rng_;
  fleet::TelemetrySnapshot telemetry_;
  transport::Outbox outbox_;
  std::vector<fleet::ChurnEvent> churn_;
  const std::atomic<bool>& stop_;
  const std::atomic<double>& submit_at_;

  detail::Clock::time_point t0_;
  Socket socket_;
  transport::FrameReader reader_;
  std::optional<Running> task_;
  bool offline_ = false;
  double last_beat_ = 0.0;
};

}  // namespace detail

/// Runs one job over loopback TCP with one thread per worker. The job is
/// submitted once every worker has registered; churn times count from submit.
inline sim::SimulationResult run_tcp(const sim::SimulationConfig& config, const coordinator::JobSpec& job,
                                     const workloads::ResumableTask& workload, const TcpOptions& options = {},
                                     const scheduler::StrategyRegistry& registry = scheduler::StrategyRegistry()) {
  fleet::validate_fleet(config.fleet);
  job.checkpoint.validate();
  coordinator::Coordinator coord(config.coordinator, workload, registry.create(job.strategy),
                                 make_rng(job.seed, 1));
  if (!config.journal_path.empty()) coord.attach_journal(std::make_shared<coordinator::Journal>(config.journal_path));

  std::uint16_t port = 0;
  Socket listener = listen_loopback(options.port, port);
  const auto t0 = detail::Clock::now();

  detail::Inbox inbox;
  std::mutex conn_mu;
  std::vector<std::unique_ptr<Socket>> conns;
  std::vector<std::thread> readers;
  std::atomic<bool> stop{false};
  std::atomic<double> submit_at{-1.0};

  std::thread acceptor([&] {
    for (;;) {
      const int fd = ::accept(listener.fd(), nullptr, nullptr);
      if (fd < 0) {
        if (errno == EINTR) continue;
        return;
      }
      std::lock_guard lock(conn_mu);
      if (stop) {
        ::close(fd);
        return;
      }
      const std::size_t id = conns.size();
      conns.push_back(std::make_unique<Socket>(fd));
      readers.emplace_back(detail::read_connection, fd, id, std::ref(inbox));
    }
  });

  // Coordinator loop: owns all coordinator state; the only writer to sockets.
  sim::SimulationResult result;
  std::exception_ptr loop_error;
  std::thread server([&] {
    try {
      std::map<std::string, std::size_t> route;
      std::map<std::size_t, std::string> owner_of;
      auto send_out = [&](const std::vector<coordinator::Outgoing>& out) {
        for (const auto& o : out) {
          auto it = route.find(o.to);
          if (it == route.end()) continue;
          int fd;
          {
            std::lock_guard lock(conn_mu);
            fd = conns[it->second]->fd();
          }
          send_all(fd, transport::encode(o.msg));
        }
      };
      double next_tick = 0.0;
      while (!coord.finished() && !coord.failed()) {
        const double now = detail::seconds_since(t0);
        if (now > options.wall_timeout_s) break;
        if (now >= next_tick) {
          send_out(coord.tick(now));
          next_tick = now + config.coordinator.heartbeat_interval_s;
        }
        auto in = inbox.pop_for(std::max(0.0, next_tick - detail::seconds_since(t0)));
        if (!in) continue;
        const double t = detail::seconds_since(t0);
        if (!in->msg) {
          auto it = owner_of.find(in->conn);
          if (it == owner_of.end()) continue;
          const std::string worker = it->second;
          owner_of.erase(it);
          if (route.count(worker) && route[worker] == in->conn) {
            route.erase(worker);
            send_out(coord.handle(Message{worker, 0, transport::DisconnectNoticeBody{}}, t));
          }
          continue;
        }
        const Message& msg = *in->msg;
        if (msg.type() == transport::MessageType::Register) {
          route[msg.sender] = in->conn;
          owner_of[in->conn] = msg.sender;
        } else if (!route.count(msg.sender) || route[msg.sender] != in->conn) {
          continue;  // traffic from a superseded connection
        }
        send_out(coord.handle(msg, t));
        if (!coord.submitted() && coord.workers().size() == config.fleet.size()) {
          submit_at = t;
          send_out(coord.submit(job, t));
        }
      }
    } catch (...) {
      loop_error = std::current_exception();
    }
    stop = true;
  });

  std::vector<std::unique_ptr<detail::WorkerAgent>> agents;
  std::vector<std::thread> workers;
  std::exception_ptr worker_error;
  std::mutex worker_error_mu;
  for (std::size_t i = 0; i < config.fleet.size(); ++i) {
    std::vector<fleet::ChurnEvent> churn;
    if (config.churn_schedule) {
      for (const auto& e : *config.churn_schedule) {
        if (e.worker_id == config.fleet[i].id) churn.push_back(e);
      }
      std::stable_sort(churn.begin(), churn.end(), [](const auto& a, const auto& b) { return a.at_s < b.at_s; });
    }
    agents.push_back(std::make_unique<detail::WorkerAgent>(config.fleet[i], workload, job, config, options, port, i,
                                                            std::move(churn), stop, submit_at));
    try {
      agents.back()->register_now(t0);
    } catch (...) {
      stop = true;
      worker_error = std::current_exception();
      break;
    }
    workers.emplace_back([&, agent = agents.back().get()] {
      try {
        agent->run();
      } catch (...) {
        std::lock_guard lock(worker_error_mu);
        if (!worker_error) worker_error = std::current_exception();
      }
    });
  }

  server.join();
  stop = true;
  for (auto& w : workers) w.join();
  {
    std::lock_guard lock(conn_mu);
    listener.shutdown();
    for (auto& c : conns) c->shutdown();
  }
  acceptor.join();
  for (auto& r : readers) r.join();

  if (loop_error) std::rethrow_exception(loop_error);
  if (worker_error && !coord.finished()) std::rethrow_exception(worker_error);

  result.completed = coord.finished();
  result.failed = !result.completed;
  if (result.completed) result.job = coord.aggregate();
  result.trace = coord.trace();
  for (const auto& t : coord.tasks()) result.accepted_commits_per_task.push_back(t.accepted_commits);
  result.rejected_commits = coord.rejected_commits();
  result.checkpoints_accepted = coord.accepted_checkpoints();
  result.end_time_s = detail::seconds_since(t0);
  return result;
}

}  // namespace crowd::tcp
