#include "tengen/arena.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace tengen {

std::string GtpPeer::require(const std::string& line) {
  std::string resp = request(line);
  if (resp.empty() || resp[0] != '=')
    throw EngineFailure("command failed: " + line + " -> " + resp);
  // Strip "=[id] " prefix and trailing blank line.
  size_t start = 1;
  while (start < resp.size() && std::isdigit(static_cast<unsigned char>(resp[start])))
    ++start;
  if (start < resp.size() && resp[start] == ' ') ++start;
  size_t end = resp.find_last_not_of('\n');
  return end == std::string::npos ? "" : resp.substr(start, end - start + 1);
}

SubprocessPeer::SubprocessPeer(const std::string& command,
                               double timeout_seconds)
    : timeout_seconds_(timeout_seconds) {
  int to_child[2], from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0)
    throw EngineFailure("pipe() failed");
  pid_ = fork();
  if (pid_ < 0) throw EngineFailure("fork() failed");
  if (pid_ == 0) {
    dup2(to_child[0], 0);
    dup2(from_child[1], 1);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), nullptr);
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);
  in_fd_ = to_child[1];
  out_fd_ = from_child[0];
}

SubprocessPeer::~SubprocessPeer() {
  if (in_fd_ >= 0) {
    const char* quit = "quit\n";
    [[maybe_unused]] ssize_t n = write(in_fd_, quit, strlen(quit));
    close(in_fd_);
  }
  if (out_fd_ >= 0) close(out_fd_);
  if (pid_ > 0) {
    int status = 0;
    for (int i = 0; i < 50; ++i) {
      if (waitpid(pid_, &status, WNOHANG) == pid_) return;
      usleep(10000);
    }
    kill(pid_, SIGKILL);
    waitpid(pid_, &status, 0);
  }
}

std::string SubprocessPeer::request(const std::string& line) {
  std::string msg = line + "\n";
  if (write(in_fd_, msg.data(), msg.size()) !=
      static_cast<ssize_t>(msg.size()))
    throw EngineFailure("write to engine failed");
  // A GTP response ends with a blank line.
  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::duration<double>(timeout_seconds_);
  for (;;) {
    size_t end = buffer_.find("\n\n");
    if (end != std::string::npos) {
      std::string resp = buffer_.substr(0, end + 2);
      buffer_.erase(0, end + 2);
      return resp;
    }
    auto remain = deadline - std::chrono::steady_clock::now();
    int ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(remain).count());
    if (ms <= 0) throw EngineFailure("engine timed out");
    struct pollfd pfd{out_fd_, POLLIN, 0};
    int rc = poll(&pfd, 1, ms);
    if (rc <= 0) throw EngineFailure("engine timed out");
    char chunk[4096];
    ssize_t n = read(out_fd_, chunk, sizeof chunk);
    if (n <= 0) throw EngineFailure("engine closed its pipe");
    buffer_.append(chunk, static_cast<size_t>(n));
  }
}

double binomial_std_error(double p, long n) {
  if (n <= 0) return 0.0;
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

namespace {

std::unique_ptr<GtpPeer> make_peer(const EngineSpec& spec, int size,
                                   double komi, uint64_t seed,
                                   double timeout) {
  if (!spec.command.empty())
    return std::make_unique<SubprocessPeer>(spec.command, timeout);
  EngineOptions opts = spec.inproc;
  opts.board_size = size;
  opts.search.komi = komi;
  opts.search.seed = seed;
  return std::make_unique<InProcessPeer>(std::move(opts));
}

uint64_t mix(uint64_t seed, uint64_t k) {
  uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct GameOutcome {
  double result_a = 0.0;  // 1 win, 0.5 draw, 0 loss for engine A
  double rps_a = 0.0;     // mean rollouts/s reported by each peer, when
  double rps_b = 0.0;     // available (in-process engines only)
  std::string note;
  SgfGame record;
};

// One game: `black_is_a` fixes seats; referee enforces rules and scoring.
GameOutcome play_game(const MatchConfig& cfg, int game_index,
                      bool black_is_a) {
  GameOutcome out;
  uint64_t seed_a = mix(cfg.seed, game_index * 2);
  uint64_t seed_b = mix(cfg.seed, game_index * 2 + 1);
  auto peer_a = make_peer(cfg.engine_a, cfg.size, cfg.komi, seed_a,
                          cfg.move_timeout_seconds);
  auto peer_b = make_peer(cfg.engine_b, cfg.size, cfg.komi, seed_b,
                          cfg.move_timeout_seconds);

  out.record.size = cfg.size;
  out.record.komi = cfg.komi;
  out.record.year = 2026;

  GtpPeer* black = black_is_a ? peer_a.get() : peer_b.get();
  GtpPeer* white = black_is_a ? peer_b.get() : peer_a.get();
  auto finish = [&](double black_result, const std::string& why) {
    out.result_a = black_is_a ? black_result : 1.0 - black_result;
    out.rps_a = peer_a->mean_rollouts_per_sec();
    out.rps_b = peer_b->mean_rollouts_per_sec();
    if (!why.empty())
      out.note = "game " + std::to_string(game_index) + ": " + why;
    if (black_result > 0.5)
      out.record.result = "B+";
    else if (black_result < 0.5)
      out.record.result = "W+";
    else
      out.record.result = "0";
  };

  Position referee(cfg.size);
  char buf[64];
  try {
    for (GtpPeer* p : {black, white}) {
      p->require("protocol_version");
      std::snprintf(buf, sizeof buf, "boardsize %d", cfg.size);
      p->require(buf);
      p->require("clear_board");
      std::snprintf(buf, sizeof buf, "komi %g", cfg.komi);
      p->require(buf);
    }
  } catch (const EngineFailure& e) {
    finish(0.5, std::string("setup failed: ") + e.what());
    out.result_a = 0.0;  // setup failure forfeits for whoever; call it a loss for A
    return out;
  }

  while (!referee.is_terminal()) {
    Color c = referee.to_move();
    GtpPeer* mover = c == Color::Black ? black : white;
    GtpPeer* other = c == Color::Black ? white : black;
    bool mover_is_black = c == Color::Black;
    std::string vertex;
    try {
      vertex = mover->require(std::string("genmove ") +
                              (c == Color::Black ? "b" : "w"));
    } catch (const EngineFailure& e) {
      finish(mover_is_black ? 0.0 : 1.0,
             std::string("forfeit (engine failure): ") + e.what());
      return out;
    }
    if (vertex == "resign") {
      finish(mover_is_black ? 0.0 : 1.0, "");
      return out;
    }
    Move mv;
    try {
      Point p = vertex_from_string(vertex, cfg.size);
      mv = p == kNoPoint ? Move::pass(c) : Move::play(c, p);
    } catch (const std::invalid_argument&) {
      finish(mover_is_black ? 0.0 : 1.0, "forfeit (bad vertex " + vertex + ")");
      return out;
    }
    if (!referee.is_legal(mv)) {
      finish(mover_is_black ? 0.0 : 1.0, "forfeit (illegal move " + vertex + ")");
      return out;
    }
    referee.apply(mv);
    out.record.moves.push_back(SgfMove{c, mv.point});
    try {
      other->require(std::string("play ") + (c == Color::Black ? "b " : "w ") +
                     vertex);
    } catch (const EngineFailure& e) {
      finish(mover_is_black ? 1.0 : 0.0,
             std::string("forfeit (relay failure): ") + e.what());
      return out;
    }
  }

  double score = referee.tromp_taylor_score(cfg.komi);
  double black_result = score > 0 ? 1.0 : score < 0 ? 0.0 : 0.5;
  finish(black_result, "");
  char res[32];
  if (score > 0)
    std::snprintf(res, sizeof res, "B+%.1f", score);
  else if (score < 0)
    std::snprintf(res, sizeof res, "W+%.1f", -score);
  else
    std::snprintf(res, sizeof res, "0");
  out.record.result = res;
  out.record.ruleset = "Tromp-Taylor";
  return out;
}

}  // namespace

MatchReport run_match(const MatchConfig& cfg) {
  if (cfg.games < 1) throw std::invalid_argument("games must be >= 1");
  MatchReport report;
  report.games = cfg.games;
  if (!cfg.out_dir.empty())
    std::filesystem::create_directories(cfg.out_dir);

  double rps_a_sum = 0.0, rps_b_sum = 0.0;
  long rps_a_n = 0, rps_b_n = 0;
  for (int g = 0; g < cfg.games; ++g) {
    bool black_is_a = !cfg.alternate_colors || g % 2 == 0;
    GameOutcome outcome = play_game(cfg, g, black_is_a);
    if (outcome.result_a > 0.5)
      ++report.wins_a;
    else if (outcome.result_a < 0.5)
      ++report.losses_a;
    else
      ++report.draws;
    if (!outcome.note.empty()) report.notes.push_back(outcome.note);
    if (!cfg.out_dir.empty()) {
      char name[64];
      std::snprintf(name, sizeof name, "game_%04d.sgf", g);
      std::string path = cfg.out_dir + "/" + name;
      std::ofstream f(path);
      f << serialize_sgf(outcome.record);
      report.sgf_paths.push_back(path);
    }
    if (outcome.rps_a > 0) {
      rps_a_sum += outcome.rps_a;
      ++rps_a_n;
    }
    if (outcome.rps_b > 0) {
      rps_b_sum += outcome.rps_b;
      ++rps_b_n;
    }
  }
  report.win_rate_a =
      (report.wins_a + 0.5 * report.draws) / static_cast<double>(cfg.games);
  report.std_error = binomial_std_error(report.win_rate_a, cfg.games);
  report.mean_rps_a = rps_a_n > 0 ? rps_a_sum / rps_a_n : 0.0;
  report.mean_rps_b = rps_b_n > 0 ? rps_b_sum / rps_b_n : 0.0;
  return report;
}

std::string MatchReport::to_table(const MatchConfig& cfg) const {
  std::ostringstream out;
  out << "Engine A: " << cfg.engine_a.name << "\n";
  out << "Engine B: " << cfg.engine_b.name << "\n";
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "games %d  A wins %d  A losses %d  draws %d\n", games, wins_a,
                losses_a, draws);
  out << buf;
  std::snprintf(buf, sizeof buf, "win rate A: %.1f%% +- %.1f\n",
                100.0 * win_rate_a, 100.0 * std_error);
  out << buf;
  for (const auto& n : notes) out << "note: " << n << "\n";
  return out.str();
}

std::string MatchReport::to_machine_lines() const {
  std::ostringstream out;
  out << "games=" << games << " wins_a=" << wins_a << " losses_a=" << losses_a
      << " draws=" << draws << " win_rate_a=" << win_rate_a
      << " std_error=" << std_error << "\n";
  for (const auto& n : notes) out << "note=" << n << "\n";
  return out.str();
}

ThroughputReport measure_throughput(const SearchConfig& cfg,
                                    const Position& pos,
                                    const PolicyNet* ppn,
                                    const PolicyNet* rpn) {
  ThroughputReport report;
  GoSearcher searcher(cfg, ppn, rpn);
  GoSearchResult result = searcher.search(pos);
  report.rollouts_per_sec = result.rollouts_per_sec;
  report.rollouts = result.rollouts;
  if (rpn) {
    report.batch_positions_per_sec = measure_positions_per_sec(
        *rpn, pos.size(), cfg.batch_size, cfg.batch_size * 4);
    report.single_positions_per_sec =
        measure_positions_per_sec(*rpn, pos.size(), 1, cfg.batch_size * 4);
  }
  return report;
}

double measure_positions_per_sec(const PolicyNet& net, int board_size,
                                 int batch, int total_positions) {
  const int n = board_size * board_size;
  std::mt19937_64 gen(7);
  std::vector<FeatureTensor> inputs(batch);
  std::vector<std::vector<uint8_t>> masks(batch);
  for (int b = 0; b < batch; ++b) {
    inputs[b].size = board_size;
    inputs[b].planes.assign(
        static_cast<size_t>(net.layers.front().in_ch) * n, 0.0f);
    for (auto& v : inputs[b].planes) v = gen() % 4 == 0 ? 1.0f : 0.0f;
    masks[b].assign(n, 1);
  }
  // Warmup.
  forward_batch(net, inputs, masks);
  int calls = (total_positions + batch - 1) / batch;
  auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < calls; ++i) forward_batch(net, inputs, masks);
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return secs > 0 ? calls * batch / secs : 0.0;
}

}  // namespace tengen
