#include "tengen/sgf.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace tengen {

namespace {

struct Property {
  std::string id;
  std::vector<std::string> values;
  size_t offset;
};

struct Parser {
  std::string_view text;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& why) const {
    throw SgfParseError(why, pos);
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  void expect(char c) {
    if (eof() || text[pos] != c)
      fail(std::string("expected '") + c + "'");
    ++pos;
  }

  std::string prop_value() {
    expect('[');
    std::string v;
    while (true) {
      if (eof()) fail("unterminated property value");
      char c = text[pos];
      if (c == '\\') {
        ++pos;
        if (eof()) fail("unterminated escape");
        v.push_back(text[pos++]);
      } else if (c == ']') {
        ++pos;
        return v;
      } else {
        v.push_back(c);
        ++pos;
      }
    }
  }

  Property property() {
    Property p;
    p.offset = pos;
    while (!eof() && std::isupper(static_cast<unsigned char>(text[pos])))
      p.id.push_back(text[pos++]);
    if (p.id.empty()) fail("expected property id");
    skip_ws();
    if (eof() || peek() != '[') fail("expected property value");
    while (!eof() && peek() == '[') {
      p.values.push_back(prop_value());
      skip_ws();
    }
    return p;
  }
};

Point parse_coord(const std::string& v, int size, const Parser& p) {
  if (v.empty()) return kNoPoint;  // pass
  if (v == "tt" && size <= 19) return kNoPoint;  // FF[3] pass
  if (v.size() != 2) throw SgfParseError("bad coordinate '" + v + "'", p.pos);
  int col = v[0] - 'a';
  int row = v[1] - 'a';
  if (col < 0 || col >= size || row < 0 || row >= size)
    throw SgfParseError("coordinate off board '" + v + "'", p.pos);
  return static_cast<Point>(row * size + col);
}

}  // namespace

SgfGame parse_sgf(std::string_view text) {
  Parser p{text};
  p.skip_ws();
  if (p.eof() || p.peek() != '(') p.fail("expected '('");
  ++p.pos;
  p.skip_ws();

  SgfGame game;
  std::vector<Property> move_props;  // resolved after SZ is known
  bool saw_node = false;
  while (true) {
    p.skip_ws();
    if (p.eof()) p.fail("unterminated game tree");
    char c = p.peek();
    if (c == ';') {
      ++p.pos;
      saw_node = true;
      p.skip_ws();
      while (!p.eof() && std::isupper(static_cast<unsigned char>(p.peek()))) {
        Property prop = p.property();
        if (prop.id == "SZ") {
          int sz = std::atoi(prop.values[0].c_str());
          if (sz > 19)
            throw SgfParseError("unsupported board size " + prop.values[0],
                                prop.offset);
          if (sz < kMinBoardSize)
            throw SgfParseError("bad board size " + prop.values[0],
                                prop.offset);
          game.size = sz;
        } else if (prop.id == "KM") {
          try {
            game.komi = std::stod(prop.values[0]);
          } catch (const std::exception&) {
            throw SgfParseError("bad komi '" + prop.values[0] + "'",
                                prop.offset);
          }
        } else if (prop.id == "HA") {
          game.handicap = std::atoi(prop.values[0].c_str());
        } else if (prop.id == "DT") {
          if (prop.values[0].size() >= 4) {
            int y = std::atoi(prop.values[0].substr(0, 4).c_str());
            if (y > 0) game.year = y;
          }
        } else if (prop.id == "RE") {
          game.result = prop.values[0];
        } else if (prop.id == "RU") {
          game.ruleset = prop.values[0];
        } else if (prop.id == "B" || prop.id == "W") {
          move_props.push_back(prop);
        } else if (prop.id == "AB" || prop.id == "AW") {
          throw SgfParseError("setup stones (AB/AW) unsupported", prop.offset);
        }
        // Other properties are ignored.
        p.skip_ws();
      }
    } else if (c == '(') {
      p.fail("variations unsupported");
    } else if (c == ')') {
      ++p.pos;
      break;
    } else {
      p.fail("unexpected character");
    }
  }
  p.skip_ws();
  if (!p.eof()) p.fail("multi-game collections unsupported");
  if (!saw_node) throw SgfParseError("empty game tree", 0);

  for (const auto& prop : move_props) {
    SgfMove mv;
    mv.color = prop.id == "B" ? Color::Black : Color::White;
    Parser at{text, prop.offset};
    mv.point = parse_coord(prop.values[0], game.size, at);
    game.moves.push_back(mv);
  }
  return game;
}

std::string serialize_sgf(const SgfGame& game) {
  std::ostringstream out;
  out << "(;GM[1]FF[4]SZ[" << game.size << "]";
  if (game.komi) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", *game.komi);
    out << "KM[" << buf << "]";
  }
  if (game.handicap > 0) out << "HA[" << game.handicap << "]";
  if (game.year) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d", *game.year);
    out << "DT[" << buf << "-01-01]";
  }
  if (!game.result.empty()) out << "RE[" << game.result << "]";
  if (!game.ruleset.empty()) out << "RU[" << game.ruleset << "]";
  for (const auto& mv : game.moves) {
    out << ";" << (mv.color == Color::Black ? "B" : "W") << "[";
    if (mv.point != kNoPoint) {
      int row = mv.point / game.size, col = mv.point % game.size;
      out << static_cast<char>('a' + col) << static_cast<char>('a' + row);
    }
    out << "]";
  }
  out << ")\n";
  return out.str();
}

std::string filter_reason(const SgfGame& game, const FilterCriteria& crit) {
  if (game.size != crit.require_size) return "size";
  if (!game.year) return "missing date";
  if (*game.year <= crit.min_year) return "year";
  if (!game.komi) return "missing komi";
  bool komi_ok = false;
  for (double k : crit.allowed_komi)
    if (std::fabs(*game.komi - k) < 1e-9) komi_ok = true;
  if (!komi_ok) return "komi";
  if (game.handicap > crit.max_handicap) return "handicap";
  return "ok";
}

bool passes_filter(const SgfGame& game, const FilterCriteria& crit) {
  return filter_reason(game, crit) == "ok";
}

ReplayResult to_training_pairs(const SgfGame& game) {
  ReplayResult out;
  Position pos(game.size);
  for (const auto& mv : game.moves) {
    if (mv.color != pos.to_move()) pos.set_to_move(mv.color);
    Move m = mv.point == kNoPoint ? Move::pass(mv.color)
                                  : Move::play(mv.color, mv.point);
    if (!pos.is_legal(m)) {
      out.truncated = true;
      return out;
    }
    if (!m.is_pass()) out.pairs.push_back(TrainingPair{pos, m});
    pos.apply(m);
  }
  return out;
}

Corpus load_corpus(const std::string& dir, const FilterCriteria& crit) {
  namespace fs = std::filesystem;
  Corpus corpus;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".sgf")
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    CorpusEntry entry;
    entry.path = path.string();
    std::ifstream f(path);
    std::string text((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
    try {
      SgfGame game = parse_sgf(text);
      entry.reason = filter_reason(game, crit);
      entry.accepted = entry.reason == "ok";
      if (entry.accepted) corpus.games.push_back(std::move(game));
    } catch (const SgfParseError& e) {
      entry.accepted = false;
      entry.reason = std::string("parse error: ") + e.what();
    }
    corpus.manifest.push_back(std::move(entry));
  }
  return corpus;
}

std::string manifest_text(const std::vector<CorpusEntry>& manifest) {
  std::ostringstream out;
  for (const auto& e : manifest)
    out << (e.accepted ? "accepted" : "rejected") << "\t" << e.path << "\t"
        << e.reason << "\n";
  return out.str();
}

SgfGame generate_synthetic_game(uint64_t seed, int size, double komi,
                                int max_moves) {
  std::mt19937_64 gen(seed);
  Position pos(size);
  SgfGame game;
  game.size = size;
  game.komi = komi;
  game.year = 1996;

  Point last = kNoPoint;
  for (int i = 0; i < max_moves && !pos.is_terminal(); ++i) {
    Color c = pos.to_move();
    Move chosen = Move::pass(c);
    // Mostly answer next to the previous move; otherwise anywhere legal.
    bool local = last != kNoPoint &&
                 std::uniform_real_distribution<double>(0, 1)(gen) < 0.8;
    std::vector<Move> cands;
    if (local) {
      int lr = last / size, lc = last % size;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          int r = lr + dr, col = lc + dc;
          if (r < 0 || r >= size || col < 0 || col >= size) continue;
          Point p = static_cast<Point>(r * size + col);
          Move m = Move::play(c, p);
          if (pos.is_legal(m) && !pos.is_true_eye(p, c)) cands.push_back(m);
        }
      }
    }
    if (cands.empty()) {
      for (Point p = 0; p < pos.num_points(); ++p) {
        Move m = Move::play(c, p);
        if (pos.is_legal(m) && !pos.is_true_eye(p, c)) cands.push_back(m);
      }
    }
    if (!cands.empty())
      chosen = cands[std::uniform_int_distribution<size_t>(
          0, cands.size() - 1)(gen)];
    game.moves.push_back(SgfMove{c, chosen.point});
    pos.apply(chosen);
    last = chosen.point;
  }
  double score = pos.tromp_taylor_score(komi);
  char buf[32];
  if (score > 0)
    std::snprintf(buf, sizeof buf, "B+%.1f", score);
  else if (score < 0)
    std::snprintf(buf, sizeof buf, "W+%.1f", -score);
  else
    std::snprintf(buf, sizeof buf, "0");
  game.result = buf;
  return game;
}

}  // namespace tengen
