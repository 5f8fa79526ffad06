#include "tengen/gtp.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>

namespace tengen {

namespace {

const char* kColumns = "ABCDEFGHJKLMNOPQRST";  // I skipped

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> cmds = {
      "protocol_version", "name",        "version",     "known_command",
      "list_commands",    "boardsize",   "clear_board", "komi",
      "play",             "genmove",     "final_score", "time_settings",
      "quit"};
  return cmds;
}

std::string success(const std::optional<int>& id, const std::string& body) {
  std::string out = "=";
  if (id) out += std::to_string(*id);
  if (!body.empty()) out += " " + body;
  out += "\n\n";
  return out;
}

std::string failure(const std::optional<int>& id, const std::string& body) {
  std::string out = "?";
  if (id) out += std::to_string(*id);
  out += " " + body + "\n\n";
  return out;
}

std::optional<Color> parse_color(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (s == "b" || s == "black") return Color::Black;
  if (s == "w" || s == "white") return Color::White;
  return std::nullopt;
}

std::string format_score(double score) {
  char buf[32];
  if (score > 0)
    std::snprintf(buf, sizeof buf, "B+%.1f", score);
  else if (score < 0)
    std::snprintf(buf, sizeof buf, "W+%.1f", -score);
  else
    std::snprintf(buf, sizeof buf, "0");
  return buf;
}

}  // namespace

GtpCommand parse_gtp_line(const std::string& line) {
  std::string clean = line;
  auto hash = clean.find('#');
  if (hash != std::string::npos) clean.resize(hash);
  std::replace(clean.begin(), clean.end(), '\t', ' ');

  GtpCommand cmd;
  std::istringstream in(clean);
  std::string tok;
  if (!(in >> tok)) return cmd;
  // Optional numeric id before the command name.
  bool numeric = !tok.empty() &&
                 std::all_of(tok.begin(), tok.end(),
                             [](unsigned char c) { return std::isdigit(c); });
  if (numeric) {
    cmd.id = std::atoi(tok.c_str());
    if (!(in >> tok)) return cmd;
  }
  std::transform(tok.begin(), tok.end(), tok.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  cmd.name = tok;
  while (in >> tok) cmd.args.push_back(tok);
  return cmd;
}

std::string vertex_to_string(Point p, int size) {
  if (p == kNoPoint) return "pass";
  int row = p / size, col = p % size;
  std::string out;
  out.push_back(kColumns[col]);
  out += std::to_string(row + 1);
  return out;
}

Point vertex_from_string(const std::string& s, int size) {
  std::string up = s;
  std::transform(up.begin(), up.end(), up.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  if (up == "PASS") return kNoPoint;
  if (up.size() < 2) throw std::invalid_argument("malformed vertex: " + s);
  int col = -1;
  for (int i = 0; i < 19; ++i)
    if (kColumns[i] == up[0]) col = i;
  if (col < 0 || col >= size)
    throw std::invalid_argument("vertex column out of range: " + s);
  for (size_t i = 1; i < up.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(up[i])))
      throw std::invalid_argument("malformed vertex: " + s);
  int row = std::atoi(up.c_str() + 1);
  if (row < 1 || row > size)
    throw std::invalid_argument("vertex row out of range: " + s);
  return static_cast<Point>((row - 1) * size + col);
}

EngineSession::EngineSession(EngineOptions opts)
    : opts_(std::move(opts)),
      pos_(opts_.board_size),
      komi_(opts_.search.komi),
      rng_(opts_.search.seed) {
  rebuild_searcher();
}

void EngineSession::rebuild_searcher() {
  SearchConfig cfg = opts_.search;
  cfg.komi = komi_;
  searcher_ = std::make_unique<GoSearcher>(cfg, opts_.ppn.get(),
                                           opts_.rpn.get());
}

void EngineSession::new_game(int size) {
  pos_ = Position(size);
  rebuild_searcher();
}

std::string EngineSession::handle_line(const std::string& line) {
  GtpCommand cmd = parse_gtp_line(line);
  if (cmd.name.empty()) return "";
  return handle(cmd);
}

std::string EngineSession::genmove(Color c) {
  if (c != pos_.to_move()) {
    pos_.set_to_move(c);
    searcher_->reset();
  }
  if (pos_.is_terminal()) {
    // Game over by rule; answer pass without searching.
    if (pos_.is_legal(Move::pass(c))) pos_.apply(Move::pass(c));
    return "pass";
  }
  Move mv = Move::pass(c);
  if (opts_.random_mover) {
    std::vector<Move> moves = pos_.legal_moves();
    mv = moves[rng_.next_below(static_cast<uint32_t>(moves.size()))];
  } else if (opts_.greedy) {
    if (!opts_.ppn) throw std::runtime_error("greedy mode requires a PPN");
    mv = greedy_move(pos_, *opts_.ppn);
  } else {
    GoSearchResult result = searcher_->search(pos_);
    rps_sum_ += result.rollouts_per_sec;
    ++searches_;
    if (result.best_value < opts_.resign_threshold) return "resign";
    mv = result.best;
  }
  pos_.apply(mv);
  searcher_->advance(mv, pos_);
  return mv.is_pass() ? "pass" : vertex_to_string(mv.point, pos_.size());
}

std::string EngineSession::handle(const GtpCommand& cmd) {
  const auto& id = cmd.id;
  try {
    if (cmd.name == "protocol_version") return success(id, "2");
    if (cmd.name == "name") return success(id, "tengen");
    if (cmd.name == "version") return success(id, "0.1");
    if (cmd.name == "known_command") {
      bool known =
          !cmd.args.empty() &&
          std::find(known_commands().begin(), known_commands().end(),
                    cmd.args[0]) != known_commands().end();
      return success(id, known ? "true" : "false");
    }
    if (cmd.name == "list_commands") {
      std::string body;
      for (size_t i = 0; i < known_commands().size(); ++i) {
        if (i) body += "\n";
        body += known_commands()[i];
      }
      return success(id, body);
    }
    if (cmd.name == "boardsize") {
      if (cmd.args.empty()) return failure(id, "boardsize not an integer");
      int size = std::atoi(cmd.args[0].c_str());
      if (size < kMinBoardSize || size > kMaxBoardSize)
        return failure(id, "unacceptable size");
      new_game(size);
      return success(id, "");
    }
    if (cmd.name == "clear_board") {
      new_game(pos_.size());
      return success(id, "");
    }
    if (cmd.name == "komi") {
      if (cmd.args.empty()) return failure(id, "komi not a float");
      komi_ = std::atof(cmd.args[0].c_str());
      rebuild_searcher();
      return success(id, "");
    }
    if (cmd.name == "play") {
      if (cmd.args.size() < 2) return failure(id, "illegal move");
      auto color = parse_color(cmd.args[0]);
      if (!color) return failure(id, "illegal move");
      Point p;
      try {
        p = vertex_from_string(cmd.args[1], pos_.size());
      } catch (const std::invalid_argument&) {
        return failure(id, "illegal move");
      }
      if (*color != pos_.to_move()) {
        pos_.set_to_move(*color);
        searcher_->reset();
      }
      Move mv = p == kNoPoint ? Move::pass(*color) : Move::play(*color, p);
      if (!pos_.is_legal(mv)) return failure(id, "illegal move");
      pos_.apply(mv);
      searcher_->advance(mv, pos_);
      return success(id, "");
    }
    if (cmd.name == "genmove") {
      if (cmd.args.empty()) return failure(id, "invalid color");
      auto color = parse_color(cmd.args[0]);
      if (!color) return failure(id, "invalid color");
      return success(id, genmove(*color));
    }
    if (cmd.name == "final_score") {
      return success(id, format_score(pos_.tromp_taylor_score(komi_)));
    }
    if (cmd.name == "time_settings") {
      // Accepted and ignored; the search budget is rollout-count based.
      return success(id, "");
    }
    if (cmd.name == "quit") {
      quit_ = true;
      return success(id, "");
    }
    return failure(id, "unknown command");
  } catch (const std::exception& e) {
    return failure(id, e.what());
  }
}

}  // namespace tengen
