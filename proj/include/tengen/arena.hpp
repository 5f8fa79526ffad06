#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tengen/gtp.hpp"
#include "tengen/sgf.hpp"

namespace tengen {

// A GTP conversation partner: either an in-process session or an external
// engine subprocess. request() returns the full response text; throws
// EngineFailure on crash, timeout, or protocol violation.
struct EngineFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class GtpPeer {
 public:
  virtual ~GtpPeer() = default;
  virtual std::string request(const std::string& line) = 0;
  virtual double mean_rollouts_per_sec() const { return 0.0; }

  // Sends a command and returns the success body; throws on "?" replies.
  std::string require(const std::string& line);
};

class InProcessPeer : public GtpPeer {
 public:
  explicit InProcessPeer(EngineOptions opts) : session_(std::move(opts)) {}
  std::string request(const std::string& line) override {
    return session_.handle_line(line);
  }
  double mean_rollouts_per_sec() const override {
    return session_.mean_rollouts_per_sec();
  }

 private:
  EngineSession session_;
};

// Launches `command` through /bin/sh with stdin/stdout pipes.
class SubprocessPeer : public GtpPeer {
 public:
  SubprocessPeer(const std::string& command, double timeout_seconds);
  ~SubprocessPeer() override;
  std::string request(const std::string& line) override;

 private:
  int in_fd_ = -1;   // child's stdin (we write)
  int out_fd_ = -1;  // child's stdout (we read)
  int pid_ = -1;
  double timeout_seconds_;
  std::string buffer_;
};

struct EngineSpec {
  std::string command;  // external engine when non-empty
  EngineOptions inproc;
  std::string name = "engine";
};

struct MatchConfig {
  EngineSpec engine_a;
  EngineSpec engine_b;
  int games = 200;
  double komi = 7.5;
  int size = 19;
  uint64_t seed = 0;
  bool alternate_colors = true;
  std::string out_dir;  // per-game SGF records when non-empty
  double move_timeout_seconds = 300.0;
};

struct MatchReport {
  int games = 0;
  int wins_a = 0;
  int losses_a = 0;
  int draws = 0;
  double win_rate_a = 0.0;  // draws count as half-wins
  double std_error = 0.0;
  double mean_rps_a = 0.0;
  double mean_rps_b = 0.0;
  std::vector<std::string> sgf_paths;
  std::vector<std::string> notes;  // forfeits and protocol violations

  std::string to_table(const MatchConfig& cfg) const;
  std::string to_machine_lines() const;
};

double binomial_std_error(double p, long n);

// Plays cfg.games full games via GTP relay with an internal referee;
// deterministic scheduling given cfg.seed.
MatchReport run_match(const MatchConfig& cfg);

struct ThroughputReport {
  double rollouts_per_sec = 0.0;
  long rollouts = 0;
  double batch_positions_per_sec = 0.0;   // forward_batch at cfg batch size
  double single_positions_per_sec = 0.0;  // batch-1 calls, same total work
};

// One full batch_search from `pos`, plus an inference-throughput probe of
// the rollout net when one is configured.
ThroughputReport measure_throughput(const SearchConfig& cfg,
                                    const Position& pos,
                                    const PolicyNet* ppn,
                                    const PolicyNet* rpn);

// positions/s through forward_batch for a given batch size.
double measure_positions_per_sec(const PolicyNet& net, int board_size,
                                 int batch, int total_positions);

}  // namespace tengen
