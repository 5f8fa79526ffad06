#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tengen/go_search.hpp"

namespace tengen {

struct GtpCommand {
  std::optional<int> id;
  std::string name;  // lowercase token
  std::vector<std::string> args;
};

GtpCommand parse_gtp_line(const std::string& line);

// "A1".."T19", column I skipped; kNoPoint <-> "pass".
std::string vertex_to_string(Point p, int size);
// Throws std::invalid_argument on malformed or out-of-range vertices.
Point vertex_from_string(const std::string& s, int size);

struct EngineOptions {
  SearchConfig search;
  int board_size = 19;
  bool greedy = false;        // play the PPN argmax instead of searching
  bool random_mover = false;  // uniform over legal moves (baseline opponent)
  double resign_threshold = 0.05;
  std::shared_ptr<PolicyNet> ppn;
  std::shared_ptr<PolicyNet> rpn;
};

// One GTP v2 session: strictly serial command handling over one game.
class EngineSession {
 public:
  explicit EngineSession(EngineOptions opts);

  // Full response text including the trailing blank line; empty string
  // when the line carries no command.
  std::string handle_line(const std::string& line);
  std::string handle(const GtpCommand& cmd);

  bool quit_requested() const { return quit_; }
  const Position& position() const { return pos_; }
  double komi() const { return komi_; }
  // Mean rollouts/s across the genmove searches of this session.
  double mean_rollouts_per_sec() const {
    return searches_ > 0 ? rps_sum_ / searches_ : 0.0;
  }

 private:
  std::string genmove(Color c);
  void new_game(int size);
  void rebuild_searcher();

  EngineOptions opts_;
  Position pos_;
  double komi_;
  std::unique_ptr<GoSearcher> searcher_;
  RngStream rng_;
  bool quit_ = false;
  double rps_sum_ = 0.0;
  long searches_ = 0;
};

}  // namespace tengen
