#include "tengen/go_search.hpp"

#include <stdexcept>

namespace tengen {

GoRolloutPolicy::GoRolloutPolicy(RolloutKind kind, const PolicyNet* rpn)
    : kind_(kind), rpn_(rpn) {
  if (kind_ == RolloutKind::Network && rpn_ == nullptr)
    throw std::invalid_argument("network rollout policy requires an RPN");
}

namespace {

void collect_empties(const Position& pos, std::vector<Point>& out) {
  out.clear();
  for (Point p = 0; p < pos.num_points(); ++p)
    if (pos.at(p) == Color::Empty) out.push_back(p);
}

// Legality-and-eye mask for rollout inference (superko off).
void rollout_mask(const Position& pos, std::vector<uint8_t>& mask) {
  const Color c = pos.to_move();
  mask.assign(pos.num_points(), 0);
  for (Point p = 0; p < pos.num_points(); ++p)
    if (pos.at(p) == Color::Empty && !pos.is_true_eye(p, c) &&
        pos.is_legal(Move::play(c, p), false))
      mask[p] = 1;
}

Move sample_from_distribution(const MoveDistribution& dist, Color c,
                              RngStream& rng) {
  if (dist.all_pass) return Move::pass(c);
  double u = rng.uniform();
  double acc = 0.0;
  int last = -1;
  for (size_t p = 0; p < dist.probs.size(); ++p) {
    if (dist.probs[p] <= 0.0f) continue;
    last = static_cast<int>(p);
    acc += dist.probs[p];
    if (u < acc) return Move::play(c, static_cast<Point>(p));
  }
  // Rounding left u just past the cumulative sum.
  if (last >= 0) return Move::play(c, static_cast<Point>(last));
  return Move::pass(c);
}

}  // namespace

// Fisher-Yates style rejection over the cached empty points: invalid
// candidates move to the tail, so the draw stays uniform over the legal
// non-eye plays.
Move GoRolloutPolicy::select_uniform(Position& pos,
                                     std::vector<Point>& empties,
                                     RngStream& rng, bool apply_move) {
  const Color c = pos.to_move();
  int m = static_cast<int>(empties.size());
  static thread_local std::vector<Point> captured;
  while (m > 0) {
    int i = static_cast<int>(rng.next_below(static_cast<uint32_t>(m)));
    Point p = empties[i];
    if (!pos.is_true_eye(p, c)) {
      if (apply_move) {
        captured.clear();
        if (pos.try_apply(Move::play(c, p), false, &captured)) {
          empties[i] = empties.back();
          empties.pop_back();
          for (Point cp : captured) empties.push_back(cp);
          return Move::play(c, p);
        }
      } else if (pos.is_legal(Move::play(c, p), false)) {
        return Move::play(c, p);
      }
    }
    std::swap(empties[i], empties[--m]);
  }
  Move pass = Move::pass(c);
  if (apply_move) pos.apply(pass, false);
  return pass;
}

void GoRolloutPolicy::begin_round(const std::vector<Position>& states) {
  empties_.resize(states.size());
  for (size_t b = 0; b < states.size(); ++b)
    collect_empties(states[b], empties_[b]);
}

void GoRolloutPolicy::step(std::vector<Position>& states,
                           const std::vector<uint8_t>& active,
                           std::vector<RngStream>& rngs) {
  if (kind_ == RolloutKind::Uniform) {
    for (size_t b = 0; b < states.size(); ++b)
      if (active[b]) select_uniform(states[b], empties_[b], rngs[b], true);
    return;
  }
  // Network policy: one batched inference per synchronized step.
  std::vector<size_t> lanes;
  std::vector<FeatureTensor> inputs;
  std::vector<std::vector<uint8_t>> masks;
  for (size_t b = 0; b < states.size(); ++b) {
    if (!active[b]) continue;
    lanes.push_back(b);
    inputs.push_back(extract_features(states[b]));
    masks.emplace_back();
    rollout_mask(states[b], masks.back());
  }
  if (lanes.empty()) return;
  std::vector<MoveDistribution> dists = forward_batch(*rpn_, inputs, masks);
  for (size_t k = 0; k < lanes.size(); ++k) {
    size_t b = lanes[k];
    Move mv = sample_from_distribution(dists[k], states[b].to_move(), rngs[b]);
    states[b].apply(mv, false);
  }
}

std::vector<Move> GoRolloutPolicy::select_batch(
    const std::vector<Position>& states, const std::vector<uint8_t>& active,
    std::vector<RngStream>& rngs) {
  std::vector<Move> moves;
  moves.reserve(states.size());
  if (kind_ == RolloutKind::Uniform) {
    std::vector<Point> empties;
    for (size_t b = 0; b < states.size(); ++b) {
      if (!active[b]) {
        moves.push_back(Move::pass(states[b].to_move()));
        continue;
      }
      Position scratch = states[b];
      collect_empties(scratch, empties);
      moves.push_back(select_uniform(scratch, empties, rngs[b], false));
    }
    return moves;
  }
  std::vector<size_t> lanes;
  std::vector<FeatureTensor> inputs;
  std::vector<std::vector<uint8_t>> masks;
  for (size_t b = 0; b < states.size(); ++b) {
    moves.push_back(Move::pass(states[b].to_move()));
    if (!active[b]) continue;
    lanes.push_back(b);
    inputs.push_back(extract_features(states[b]));
    masks.emplace_back();
    rollout_mask(states[b], masks.back());
  }
  if (lanes.empty()) return moves;
  std::vector<MoveDistribution> dists = forward_batch(*rpn_, inputs, masks);
  for (size_t k = 0; k < lanes.size(); ++k)
    moves[lanes[k]] = sample_from_distribution(
        dists[k], states[lanes[k]].to_move(), rngs[lanes[k]]);
  return moves;
}

double GoRolloutPolicy::rollout_one(Position state, RngStream& rng,
                                    double komi) {
  if (kind_ == RolloutKind::Uniform) {
    std::vector<Point> empties;
    collect_empties(state, empties);
    while (!state.is_terminal()) select_uniform(state, empties, rng, true);
  } else {
    std::vector<Position> states;
    states.push_back(std::move(state));
    std::vector<uint8_t> active{1};
    std::vector<RngStream> rngs;
    rngs.push_back(rng);
    while (!states[0].is_terminal()) step(states, active, rngs);
    rng = rngs[0];
    state = std::move(states[0]);
  }
  double score = state.tromp_taylor_score(komi);
  return score > 0 ? 1.0 : score < 0 ? 0.0 : 0.5;
}

std::vector<Move> rollout_step_batch(std::vector<Position>& states,
                                     GoRolloutPolicy& policy,
                                     std::vector<RngStream>& rngs) {
  std::vector<uint8_t> active(states.size());
  for (size_t b = 0; b < states.size(); ++b)
    active[b] = !states[b].is_terminal();
  std::vector<Move> moves = policy.select_batch(states, active, rngs);
  for (size_t b = 0; b < states.size(); ++b)
    if (active[b]) states[b].apply(moves[b], false);
  return moves;
}

Move greedy_move(const Position& pos, const PolicyNet& ppn) {
  if (pos.is_terminal())
    throw std::invalid_argument("greedy_move from terminal position");
  std::vector<uint8_t> mask(pos.num_points(), 0);
  bool any = false;
  for (Point p = 0; p < pos.num_points(); ++p) {
    if (pos.at(p) == Color::Empty &&
        pos.is_legal(Move::play(pos.to_move(), p))) {
      mask[p] = 1;
      any = true;
    }
  }
  if (!any) return Move::pass(pos.to_move());
  std::vector<MoveDistribution> dists =
      forward_batch(ppn, {extract_features(pos)}, {mask});
  const auto& probs = dists[0].probs;
  int best = -1;
  for (int p = 0; p < pos.num_points(); ++p) {
    if (!mask[p]) continue;
    if (best < 0 || probs[p] > probs[best]) best = p;
  }
  return Move::play(pos.to_move(), static_cast<Point>(best));
}

GoSearcher::GoSearcher(SearchConfig cfg, const PolicyNet* ppn,
                       const PolicyNet* rpn)
    : cfg_(cfg), ppn_(ppn) {
  rollout_ = std::make_unique<GoRolloutPolicy>(cfg.rollout_policy, rpn);
  GoGame game;
  game.komi = cfg.komi;
  core_ = std::make_unique<Searcher<GoGame>>(game, cfg);
  if (ppn_) {
    core_->set_prior_fn([this](const Position& pos,
                               const std::vector<Move>& actions) {
      std::vector<uint8_t> mask(pos.num_points(), 0);
      for (const Move& m : actions)
        if (!m.is_pass()) mask[m.point] = 1;
      std::vector<MoveDistribution> dists =
          forward_batch(*ppn_, {extract_features(pos)}, {mask});
      std::vector<double> out;
      out.reserve(actions.size());
      for (const Move& m : actions)
        out.push_back(m.is_pass() ? 0.0 : dists[0].probs[m.point]);
      return out;
    });
  }
  double komi = cfg.komi;
  core_->set_rollout_one([this, komi](Position s, RngStream& rng) {
    return rollout_->rollout_one(std::move(s), rng, komi);
  });
  core_->set_round_begin(
      [this](const std::vector<Position>& states) { rollout_->begin_round(states); });
  core_->set_rollout_step([this](std::vector<Position>& states,
                                 const std::vector<uint8_t>& active,
                                 std::vector<RngStream>& rngs) {
    rollout_->step(states, active, rngs);
  });
}

GoSearchResult GoSearcher::search(const Position& pos) {
  if (!cfg_.reuse_tree) core_->reset();
  return core_->batch_search(pos);
}

GoSearchResult GoSearcher::uct(const Position& pos, long budget) {
  if (!cfg_.reuse_tree) core_->reset();
  return core_->uct_search(pos, budget);
}

void GoSearcher::advance(const Move& played, const Position& new_state) {
  if (cfg_.reuse_tree)
    core_->advance(played, new_state);
  else
    core_->reset();
}

void GoSearcher::reset() { core_->reset(); }

}  // namespace tengen
