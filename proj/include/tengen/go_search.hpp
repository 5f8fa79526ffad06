#pragma once

#include <memory>
#include <optional>

#include "tengen/features.hpp"
#include "tengen/goban.hpp"
#include "tengen/policy_net.hpp"
#include "tengen/search.hpp"

namespace tengen {

// Go instantiation of the abstract game interface. Superko is enforced for
// in-tree play; rollout stepping runs with superko bookkeeping off and is
// bounded by the move cap instead.
struct GoGame {
  using State = Position;
  using Action = Move;

  double komi = 7.5;

  std::vector<Move> legal_actions(const Position& s) const {
    return s.legal_moves(true);
  }
  void apply(Position& s, const Move& a) const { s.apply(a, true); }
  bool is_terminal(const Position& s) const { return s.is_terminal(); }
  int player(const Position& s) const {
    return s.to_move() == Color::Black ? 0 : 1;
  }
  uint64_t state_key(const Position& s) const { return s.hash(); }
  double value(const Position& s, RngStream&) const {
    double score = s.tromp_taylor_score(komi);
    return score > 0 ? 1.0 : score < 0 ? 0.0 : 0.5;
  }
};

using GoSearchResult = SearchResultT<Move>;

// Rollout move selection, batched: Uniform picks uniformly among legal
// non-eye-filling plays (else pass); Network samples from one batched RPN
// inference over the non-terminal lanes.
class GoRolloutPolicy {
 public:
  GoRolloutPolicy(RolloutKind kind, const PolicyNet* rpn = nullptr);

  RolloutKind kind() const { return kind_; }

  // Selects one move per lane without applying it; inactive (terminal)
  // lanes get a pass placeholder and see no inference.
  std::vector<Move> select_batch(const std::vector<Position>& states,
                                 const std::vector<uint8_t>& active,
                                 std::vector<RngStream>& rngs);

  // Fast path used inside search: selects and applies, keeping per-lane
  // empty-point caches across steps of one rollout phase.
  void begin_round(const std::vector<Position>& states);
  void step(std::vector<Position>& states, const std::vector<uint8_t>& active,
            std::vector<RngStream>& rngs);

  // Sequential playout to a terminal state; returns the Black win value.
  double rollout_one(Position state, RngStream& rng, double komi);

 private:
  Move select_uniform(Position& pos, std::vector<Point>& empties,
                      RngStream& rng, bool apply);

  RolloutKind kind_;
  const PolicyNet* rpn_;
  std::vector<std::vector<Point>> empties_;  // per lane
};

// Single spec'd rollout step over a batch of states (applies the moves).
std::vector<Move> rollout_step_batch(std::vector<Position>& states,
                                     GoRolloutPolicy& policy,
                                     std::vector<RngStream>& rngs);

// Legal non-superko plays only; pass iff there is no legal play.
Move greedy_move(const Position& pos, const PolicyNet& ppn);

// Full engine search for one Go position: owns the tree (reused across
// moves when cfg.reuse_tree), the rollout policy, and the PPN prior hook.
class GoSearcher {
 public:
  GoSearcher(SearchConfig cfg, const PolicyNet* ppn = nullptr,
             const PolicyNet* rpn = nullptr);

  GoSearchResult search(const Position& pos);
  // Classic sequential UCT with an explicit iteration budget.
  GoSearchResult uct(const Position& pos, long budget);
  void advance(const Move& played, const Position& new_state);
  void reset();

  Searcher<GoGame>& core() { return *core_; }
  const SearchConfig& config() const { return cfg_; }

 private:
  SearchConfig cfg_;
  const PolicyNet* ppn_;
  std::unique_ptr<GoRolloutPolicy> rollout_;
  std::unique_ptr<Searcher<GoGame>> core_;
};

}  // namespace tengen
