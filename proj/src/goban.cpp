#include "tengen/goban.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cstdint>

namespace tengen {

namespace {

constexpr uint64_t kZobristSeed = 0x5eed90ba11dead17ULL;

uint64_t splitmix64(uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct ZobristTable {
  std::array<uint64_t, kMaxBoardSize * kMaxBoardSize * 2> keys;
  uint64_t side;
  ZobristTable() {
    uint64_t s = kZobristSeed;
    for (auto& k : keys) k = splitmix64(s);
    side = splitmix64(s);
  }
};

const ZobristTable& ztable() {
  static const ZobristTable t;
  return t;
}

}  // namespace

uint64_t zobrist_key(Point p, Color c) {
  return ztable().keys[static_cast<size_t>(p) * 2 +
                       (c == Color::Black ? 0 : 1)];
}

uint64_t zobrist_side_key() { return ztable().side; }

Position::Position(int size) : size_(size) {
  if (size < kMinBoardSize || size > kMaxBoardSize)
    throw std::invalid_argument("board size out of range [2,19]: " +
                                std::to_string(size));
  grid_.assign(num_points(), 0);
  prev_grid_.assign(num_points(), 0);
  prev_prev_grid_.assign(num_points(), 0);
  mark_.assign(num_points(), 0);
}

int Position::neighbors(Point p, Point out[4]) const {
  int n = 0;
  int r = p / size_, c = p % size_;
  if (r > 0) out[n++] = p - size_;
  if (r < size_ - 1) out[n++] = p + size_;
  if (c > 0) out[n++] = p - 1;
  if (c < size_ - 1) out[n++] = p + 1;
  return n;
}

// Flood-fills the chain at p, counting distinct liberties up to `cap`.
// Uses two stamp values per call: epoch for stones, epoch+1 for liberties.
int Position::liberties_upto(Point p, int cap) const {
  if (mark_epoch_ > INT32_MAX - 8) {
    std::fill(mark_.begin(), mark_.end(), 0);
    mark_epoch_ = 0;
  }
  mark_epoch_ += 2;
  const int32_t stone_mark = mark_epoch_;
  const int32_t lib_mark = mark_epoch_ + 1;
  const uint8_t color = grid_[p];
  int libs = 0;
  Point stack[kMaxBoardSize * kMaxBoardSize];
  int top = 0;
  stack[top++] = p;
  mark_[p] = stone_mark;
  Point nb[4];
  while (top > 0) {
    Point q = stack[--top];
    int nn = neighbors(q, nb);
    for (int i = 0; i < nn; ++i) {
      Point r = nb[i];
      if (mark_[r] == stone_mark || mark_[r] == lib_mark) continue;
      if (grid_[r] == 0) {
        mark_[r] = lib_mark;
        if (++libs >= cap) return libs;
      } else if (grid_[r] == color) {
        mark_[r] = stone_mark;
        stack[top++] = r;
      }
    }
  }
  return libs;
}

int Position::count_chain(Point p, uint8_t color, std::vector<Point>& stones,
                          int* liberties) const {
  if (mark_epoch_ > INT32_MAX - 8) {
    std::fill(mark_.begin(), mark_.end(), 0);
    mark_epoch_ = 0;
  }
  mark_epoch_ += 2;
  const int32_t stone_mark = mark_epoch_;
  const int32_t lib_mark = mark_epoch_ + 1;
  int libs = 0;
  size_t start = stones.size();
  stones.push_back(p);
  mark_[p] = stone_mark;
  Point nb[4];
  for (size_t i = start; i < stones.size(); ++i) {
    Point q = stones[i];
    int nn = neighbors(q, nb);
    for (int j = 0; j < nn; ++j) {
      Point r = nb[j];
      if (mark_[r] == stone_mark || mark_[r] == lib_mark) continue;
      if (grid_[r] == 0) {
        mark_[r] = lib_mark;
        ++libs;
      } else if (grid_[r] == color) {
        mark_[r] = stone_mark;
        stones.push_back(r);
      }
    }
  }
  if (liberties) *liberties = libs;
  return static_cast<int>(stones.size() - start);
}

int Position::chain_liberties(Point p) const {
  assert(grid_[p] != 0);
  return liberties_upto(p, num_points());
}

void Position::remove_chain(Point p, uint8_t color,
                            std::vector<Point>* captured) {
  Point stack[kMaxBoardSize * kMaxBoardSize];
  int top = 0;
  stack[top++] = p;
  grid_[p] = 0;
  hash_ ^= zobrist_key(p, static_cast<Color>(color));
  if (captured) captured->push_back(p);
  Point nb[4];
  while (top > 0) {
    Point q = stack[--top];
    int nn = neighbors(q, nb);
    for (int i = 0; i < nn; ++i) {
      Point r = nb[i];
      if (grid_[r] == color) {
        grid_[r] = 0;
        hash_ ^= zobrist_key(r, static_cast<Color>(color));
        if (captured) captured->push_back(r);
        stack[top++] = r;
      }
    }
  }
}

bool Position::is_legal(const Move& mv, bool check_superko) const {
  if (mv.color != to_move_) return false;
  if (mv.is_pass()) return true;
  Point p = mv.point;
  if (p < 0 || p >= num_points()) return false;
  if (grid_[p] != 0) return false;
  if (p == ko_point_) return false;

  const uint8_t own = static_cast<uint8_t>(to_move_);
  const uint8_t enemy = static_cast<uint8_t>(opponent(to_move_));
  Point nb[4];
  int nn = neighbors(p, nb);

  uint64_t cap_hash = 0;
  bool any_capture = false;
  bool has_empty_nb = false;
  // Captured chains, deduplicated via a representative scan.
  std::vector<Point> cap_stones;
  for (int i = 0; i < nn; ++i) {
    Point q = nb[i];
    if (grid_[q] == 0) {
      has_empty_nb = true;
    } else if (grid_[q] == enemy) {
      bool seen = false;
      for (Point s : cap_stones)
        if (s == q) { seen = true; break; }
      if (seen) continue;
      // Liberty 1 means p is the chain's last liberty.
      if (liberties_upto(q, 2) == 1) {
        size_t before = cap_stones.size();
        count_chain(q, enemy, cap_stones, nullptr);
        for (size_t k = before; k < cap_stones.size(); ++k)
          cap_hash ^= zobrist_key(cap_stones[k], static_cast<Color>(enemy));
        any_capture = true;
      }
    }
  }

  if (!any_capture && !has_empty_nb) {
    // Suicide unless a friendly neighbor chain keeps a spare liberty.
    if (mark_epoch_ > INT32_MAX - 8) {
      std::fill(mark_.begin(), mark_.end(), 0);
      mark_epoch_ = 0;
    }
    mark_epoch_ += 2;
    const int32_t stone_mark = mark_epoch_;
    const int32_t lib_mark = mark_epoch_ + 1;
    mark_[p] = stone_mark;
    bool spare = false;
    Point stack[kMaxBoardSize * kMaxBoardSize];
    int top = 0;
    for (int i = 0; i < nn && !spare; ++i) {
      if (grid_[nb[i]] != own || mark_[nb[i]] == stone_mark) continue;
      mark_[nb[i]] = stone_mark;
      stack[top++] = nb[i];
      Point nb2[4];
      while (top > 0 && !spare) {
        Point q = stack[--top];
        int n2 = neighbors(q, nb2);
        for (int j = 0; j < n2; ++j) {
          Point r = nb2[j];
          if (mark_[r] == stone_mark || mark_[r] == lib_mark) continue;
          if (grid_[r] == 0) {
            mark_[r] = lib_mark;
            spare = true;
            break;
          }
          if (grid_[r] == own) {
            mark_[r] = stone_mark;
            stack[top++] = r;
          }
        }
      }
    }
    if (!spare) return false;
  }

  if (check_superko) {
    uint64_t next = hash_ ^ zobrist_key(p, to_move_) ^ cap_hash ^
                    zobrist_side_key();
    if (history_.contains(next)) return false;
  }
  return true;
}

std::vector<Move> Position::legal_moves(bool check_superko) const {
  std::vector<Move> out;
  out.reserve(num_points() + 1);
  for (Point p = 0; p < num_points(); ++p) {
    Move mv = Move::play(to_move_, p);
    if (is_legal(mv, check_superko)) out.push_back(mv);
  }
  out.push_back(Move::pass(to_move_));
  return out;
}

bool Position::try_apply(const Move& mv, bool check_superko,
                         std::vector<Point>* captured) {
  if (!is_legal(mv, check_superko)) return false;

  if (check_superko) history_.insert(hash_);
  prev_prev_grid_.swap(prev_grid_);
  prev_grid_ = grid_;

  if (mv.is_pass()) {
    ++consecutive_passes_;
    ++move_count_;
    ko_point_ = kNoPoint;
    hash_ ^= zobrist_side_key();
    to_move_ = opponent(to_move_);
    return true;
  }

  const Point p = mv.point;
  const uint8_t enemy = static_cast<uint8_t>(opponent(to_move_));
  grid_[p] = static_cast<uint8_t>(to_move_);
  hash_ ^= zobrist_key(p, to_move_);

  size_t ncap_before = captured ? captured->size() : 0;
  std::vector<Point> local_caps;
  std::vector<Point>* caps = captured ? captured : &local_caps;
  Point nb[4];
  int nn = neighbors(p, nb);
  for (int i = 0; i < nn; ++i) {
    Point q = nb[i];
    if (grid_[q] == enemy && liberties_upto(q, 1) == 0)
      remove_chain(q, enemy, caps);
  }
  size_t ncaps = caps->size() - (captured ? ncap_before : 0);

  // Simple ko: one stone captured by a lone new stone that has one liberty.
  ko_point_ = kNoPoint;
  if (ncaps == 1) {
    bool lone = true;
    for (int i = 0; i < nn; ++i)
      if (grid_[nb[i]] == static_cast<uint8_t>(to_move_)) lone = false;
    if (lone && liberties_upto(p, 2) == 1) ko_point_ = caps->back();
  }

  consecutive_passes_ = 0;
  ++move_count_;
  hash_ ^= zobrist_side_key();
  to_move_ = opponent(to_move_);
  return true;
}

void Position::apply(const Move& mv, bool check_superko,
                     std::vector<Point>* captured) {
  if (!try_apply(mv, check_superko, captured)) {
    if (mv.color != to_move_) throw IllegalMove("wrong color to move");
    if (!mv.is_pass() && mv.point == ko_point_) throw IllegalMove("ko");
    if (!mv.is_pass() && grid_[mv.point] != 0)
      throw IllegalMove("occupied point");
    if (!mv.is_pass() && !is_legal(mv, false)) throw IllegalMove("suicide");
    throw IllegalMove("superko repetition");
  }
}

Position Position::played(const Move& mv) const {
  Position next = *this;
  next.apply(mv);
  return next;
}

void Position::set_to_move(Color c) {
  if (c == to_move_) return;
  to_move_ = c;
  hash_ ^= zobrist_side_key();
  ko_point_ = kNoPoint;
}

bool Position::is_terminal() const {
  return consecutive_passes_ >= 2 || move_count_ >= 2 * num_points();
}

double Position::tromp_taylor_score(double komi) const {
  int black = 0, white = 0;
  std::vector<uint8_t> seen(num_points(), 0);
  std::vector<Point> stack;
  for (Point p = 0; p < num_points(); ++p) {
    if (grid_[p] == static_cast<uint8_t>(Color::Black)) {
      ++black;
    } else if (grid_[p] == static_cast<uint8_t>(Color::White)) {
      ++white;
    } else if (!seen[p]) {
      // Empty region: credit it to a color iff it borders only that color.
      int region = 0;
      bool touch_b = false, touch_w = false;
      stack.clear();
      stack.push_back(p);
      seen[p] = 1;
      Point nb[4];
      while (!stack.empty()) {
        Point q = stack.back();
        stack.pop_back();
        ++region;
        int nn = neighbors(q, nb);
        for (int i = 0; i < nn; ++i) {
          Point r = nb[i];
          if (grid_[r] == 0) {
            if (!seen[r]) {
              seen[r] = 1;
              stack.push_back(r);
            }
          } else if (grid_[r] == static_cast<uint8_t>(Color::Black)) {
            touch_b = true;
          } else {
            touch_w = true;
          }
        }
      }
      if (touch_b && !touch_w) black += region;
      if (touch_w && !touch_b) white += region;
    }
  }
  return static_cast<double>(black) - static_cast<double>(white) - komi;
}

bool Position::is_true_eye(Point p, Color c) const {
  if (grid_[p] != 0) return false;
  const uint8_t own = static_cast<uint8_t>(c);
  Point nb[4];
  int nn = neighbors(p, nb);
  for (int i = 0; i < nn; ++i)
    if (grid_[nb[i]] != own) return false;
  // Diagonal control: interior points tolerate one enemy diagonal,
  // edge and corner points none.
  const uint8_t enemy = static_cast<uint8_t>(opponent(c));
  int r = p / size_, col = p % size_;
  int diag_total = 0, diag_enemy = 0;
  for (int dr = -1; dr <= 1; dr += 2) {
    for (int dc = -1; dc <= 1; dc += 2) {
      int rr = r + dr, cc = col + dc;
      if (rr < 0 || rr >= size_ || cc < 0 || cc >= size_) continue;
      ++diag_total;
      if (grid_[rr * size_ + cc] == enemy) ++diag_enemy;
    }
  }
  return diag_total == 4 ? diag_enemy <= 1 : diag_enemy == 0;
}

uint64_t Position::recompute_hash() const {
  uint64_t h = 0;
  for (Point p = 0; p < num_points(); ++p)
    if (grid_[p] != 0) h ^= zobrist_key(p, static_cast<Color>(grid_[p]));
  if (to_move_ == Color::White) h ^= zobrist_side_key();
  return h;
}

std::vector<int> grid_chain_liberty_map(const std::vector<uint8_t>& grid,
                                        int size) {
  const int n = size * size;
  std::vector<int> libs(n, 0);
  std::vector<uint8_t> seen(n, 0);
  std::vector<Point> chain;
  std::vector<uint8_t> lib_seen(n, 0);
  std::vector<Point> lib_list;
  auto neigh = [&](Point p, Point out[4]) {
    int cnt = 0;
    int r = p / size, c = p % size;
    if (r > 0) out[cnt++] = p - size;
    if (r < size - 1) out[cnt++] = p + size;
    if (c > 0) out[cnt++] = p - 1;
    if (c < size - 1) out[cnt++] = p + 1;
    return cnt;
  };
  for (Point p = 0; p < n; ++p) {
    if (grid[p] == 0 || seen[p]) continue;
    const uint8_t color = grid[p];
    chain.clear();
    lib_list.clear();
    chain.push_back(p);
    seen[p] = 1;
    Point nb[4];
    for (size_t i = 0; i < chain.size(); ++i) {
      int nn = neigh(chain[i], nb);
      for (int j = 0; j < nn; ++j) {
        Point q = nb[j];
        if (grid[q] == 0) {
          if (!lib_seen[q]) {
            lib_seen[q] = 1;
            lib_list.push_back(q);
          }
        } else if (grid[q] == color && !seen[q]) {
          seen[q] = 1;
          chain.push_back(q);
        }
      }
    }
    for (Point s : chain) libs[s] = static_cast<int>(lib_list.size());
    for (Point q : lib_list) lib_seen[q] = 0;
  }
  return libs;
}

}  // namespace tengen
