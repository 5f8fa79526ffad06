#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace tengen {

enum class Color : uint8_t { Empty = 0, Black = 1, White = 2 };

inline Color opponent(Color c) {
  return c == Color::Black ? Color::White : Color::Black;
}

// Point index = row * size + col.
using Point = int16_t;
constexpr Point kNoPoint = -1;

struct Move {
  Color color = Color::Black;
  Point point = kNoPoint;  // kNoPoint means pass

  bool is_pass() const { return point == kNoPoint; }
  static Move pass(Color c) { return Move{c, kNoPoint}; }
  static Move play(Color c, Point p) { return Move{c, p}; }
  bool operator==(const Move&) const = default;
};

struct IllegalMove : std::runtime_error {
  explicit IllegalMove(const std::string& why) : std::runtime_error(why) {}
};

constexpr int kMinBoardSize = 2;
constexpr int kMaxBoardSize = 19;

// Full game state. Value type: play() returns a new Position, apply()
// mutates an exclusively owned one. The zobrist table is process-global
// and seeded from a fixed constant.
class Position {
 public:
  explicit Position(int size);

  int size() const { return size_; }
  int num_points() const { return size_ * size_; }
  Color at(Point p) const { return static_cast<Color>(grid_[p]); }
  Color to_move() const { return to_move_; }
  Point ko_point() const { return ko_point_; }
  uint64_t hash() const { return hash_; }
  int move_count() const { return move_count_; }
  int consecutive_passes() const { return consecutive_passes_; }
  const std::vector<uint8_t>& grid() const { return grid_; }
  // Occupancy one and two plies ago (zero-filled before moves exist).
  const std::vector<uint8_t>& prev_grid() const { return prev_grid_; }
  const std::vector<uint8_t>& prev_prev_grid() const { return prev_prev_grid_; }
  const std::unordered_set<uint64_t>& history_hashes() const { return history_; }

  // Board-state repetition check (positional superko) is optional so that
  // rollouts can skip the history bookkeeping; repetition there is bounded
  // by the move cap instead.
  bool is_legal(const Move& mv, bool check_superko = true) const;
  std::vector<Move> legal_moves(bool check_superko = true) const;

  // Mutating play. Throws IllegalMove. When `captured` is given, the
  // removed points are appended to it.
  void apply(const Move& mv, bool check_superko = true,
             std::vector<Point>* captured = nullptr);
  // Non-throwing variant; leaves the position untouched on an illegal move.
  bool try_apply(const Move& mv, bool check_superko = true,
                 std::vector<Point>* captured = nullptr);
  Position played(const Move& mv) const;

  // GTP allows out-of-turn placements; this flips the side without a move.
  void set_to_move(Color c);

  bool is_terminal() const;
  // Area score from Black's perspective: stones plus empty regions
  // bordering exactly one color, minus komi.
  double tromp_taylor_score(double komi) const;

  // Liberties of the chain containing p (p must be occupied).
  int chain_liberties(Point p) const;
  // Single-point true eye for `c` at empty point p.
  bool is_true_eye(Point p, Color c) const;
  // Full-scan hash, for checking the incremental one.
  uint64_t recompute_hash() const;

  // Neighbor iteration helper.
  int neighbors(Point p, Point out[4]) const;

 private:
  int count_chain(Point p, uint8_t color, std::vector<Point>& stones,
                  int* liberties) const;
  void remove_chain(Point p, uint8_t color, std::vector<Point>* captured);
  // Liberties of the chain at p, early-exit once `cap` found.
  int liberties_upto(Point p, int cap) const;

  int size_ = 0;
  std::vector<uint8_t> grid_;
  Color to_move_ = Color::Black;
  Point ko_point_ = kNoPoint;
  uint64_t hash_ = 0;
  std::unordered_set<uint64_t> history_;
  std::vector<uint8_t> prev_grid_;
  std::vector<uint8_t> prev_prev_grid_;
  int consecutive_passes_ = 0;
  int move_count_ = 0;

  mutable std::vector<int32_t> mark_;  // flood-fill stamps
  mutable int32_t mark_epoch_ = 0;
};

// Zobrist keys, fixed seed.
uint64_t zobrist_key(Point p, Color c);
uint64_t zobrist_side_key();

// Per-point liberty count of the containing chain (0 at empty points),
// computed from a bare occupancy grid. Used for the previous-time-step
// feature planes, which only keep occupancy.
std::vector<int> grid_chain_liberty_map(const std::vector<uint8_t>& grid,
                                        int size);

}  // namespace tengen
