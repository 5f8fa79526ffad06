#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tengen/goban.hpp"

namespace tengen {

struct SgfMove {
  Color color = Color::Black;
  Point point = kNoPoint;  // kNoPoint = pass

  bool operator==(const SgfMove&) const = default;
};

struct SgfGame {
  int size = 19;
  std::optional<double> komi;
  int handicap = 0;
  std::optional<int> year;
  std::string result;
  std::string ruleset;
  std::vector<SgfMove> moves;

  bool operator==(const SgfGame&) const = default;
};

struct SgfParseError : std::runtime_error {
  size_t offset;
  SgfParseError(const std::string& why, size_t off)
      : std::runtime_error(why + " at byte " + std::to_string(off)),
        offset(off) {}
};

// FF[3]/FF[4] subset: one game tree, main line only. Variations,
// setup-stone properties (AB/AW) and multi-game collections are rejected.
SgfGame parse_sgf(std::string_view text);
std::string serialize_sgf(const SgfGame& game);

struct FilterCriteria {
  int require_size = 19;
  int min_year = 1950;  // accepted iff year > min_year
  std::vector<double> allowed_komi = {2.75, 3.75, 5.5, 6.5};
  int max_handicap = 0;
};

// Missing metadata fails closed.
bool passes_filter(const SgfGame& game, const FilterCriteria& crit);
// As above but reports why a game was rejected ("ok" when accepted).
std::string filter_reason(const SgfGame& game, const FilterCriteria& crit);

struct TrainingPair {
  Position position;
  Move move;
};

struct ReplayResult {
  std::vector<TrainingPair> pairs;
  bool truncated = false;  // an illegal recorded move aborted the replay
};

// Replays the game through the rules engine, emitting one
// (position-before-move, move) pair per non-pass move.
ReplayResult to_training_pairs(const SgfGame& game);

struct CorpusEntry {
  std::string path;
  bool accepted = false;
  std::string reason;
};

struct Corpus {
  std::vector<SgfGame> games;
  std::vector<CorpusEntry> manifest;
};

// Reads every .sgf under `dir` (non-recursive), applying the filter.
Corpus load_corpus(const std::string& dir, const FilterCriteria& crit);

// One line per file: "<accepted|rejected>\t<path>\t<reason>".
std::string manifest_text(const std::vector<CorpusEntry>& manifest);

// Seeded random legal game with a locality bias (most moves adjacent to
// the previous move), suitable for desk-scale training corpora.
SgfGame generate_synthetic_game(uint64_t seed, int size = 19,
                                double komi = 5.5, int max_moves = 180);

}  // namespace tengen
