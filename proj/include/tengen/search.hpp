#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "tengen/bandit.hpp"

namespace tengen {

enum class BanditKind { UCB1, Thompson };
enum class RolloutKind { Uniform, Network };

struct SearchConfig {
  int total_rollouts = 5120;  // per move
  int batch_size = 64;        // B; total_rollouts must divide evenly
  BanditKind bandit = BanditKind::Thompson;
  double ucb_c = kDefaultUcbC;
  double prior_strength = 16.0;  // K pseudo-counts per child
  RolloutKind rollout_policy = RolloutKind::Uniform;
  double komi = 7.5;
  int rollout_move_cap = 0;  // 0 = game default (2 * size^2)
  uint64_t seed = 0;
  bool reuse_tree = true;
};

template <class A>
struct SearchResultT {
  A best{};
  // (action, n_j) per root child, in child order; n_j includes any
  // injected prior pseudo-counts.
  std::vector<std::pair<A, double>> root_visits;
  double best_value = 0.5;  // w/n of the chosen child
  long rollouts = 0;
  double seconds = 0.0;
  double rollouts_per_sec = 0.0;
};

// Max-normalized equivalent experience: n_j <- K, w_j <- K * p_j / max p.
template <class Edge>
void inject_priors(std::vector<Edge>& edges, const std::vector<double>& probs,
                   double strength) {
  if (edges.empty()) throw std::invalid_argument("inject_priors: no children");
  if (probs.size() != edges.size())
    throw std::invalid_argument("inject_priors: prior size mismatch");
  double max_p = 0.0;
  for (double p : probs) max_p = std::max(max_p, p);
  for (size_t j = 0; j < edges.size(); ++j) {
    double normalized = max_p > 0.0 ? probs[j] / max_p : 1.0;
    edges[j].prior = normalized;
    edges[j].stats.n = strength;
    edges[j].stats.w = strength * normalized;
  }
}

// Bulk-synchronous tree search, generic over a game model. The Game type
// provides:
//   using State, Action;
//   std::vector<Action> legal_actions(const State&) const;
//   void apply(State&, const Action&) const;
//   bool is_terminal(const State&) const;
//   int player(const State&) const;                 // 0 or 1, to move
//   double value(const State&, RngStream&) const;   // terminal, for player 0
//   uint64_t state_key(const State&) const;
template <class Game>
class Searcher {
 public:
  using State = typename Game::State;
  using Action = typename Game::Action;
  using Result = SearchResultT<Action>;

  struct Edge {
    Action action{};
    ArmStats stats;
    double prior = 0.0;
    int child = -1;
  };

  struct Node {
    uint64_t key = 0;
    int player = 0;
    bool terminal = false;
    std::vector<Edge> edges;
  };

  // Prior move probabilities for a newly expanded node's actions; empty
  // function disables equivalent-experience injection.
  using PriorFn =
      std::function<std::vector<double>(const State&, const std::vector<Action>&)>;
  // Play one state to a terminal and return its value for player 0.
  using RolloutOneFn = std::function<double(State, RngStream&)>;
  // Advance every active lane by one synchronized move.
  using RolloutStepFn = std::function<void(
      std::vector<State>&, const std::vector<uint8_t>&, std::vector<RngStream>&)>;
  // Called at the start of each batch rollout phase.
  using RoundBeginFn = std::function<void(const std::vector<State>&)>;
  // Test observer: first root action chosen by each lane of a round.
  using FirstActionObserver =
      std::function<void(int round, const std::vector<Action>&)>;

  Searcher(Game game, SearchConfig cfg)
      : game_(std::move(game)), cfg_(cfg), explore_rng_(cfg.seed) {}

  void set_prior_fn(PriorFn fn) { prior_fn_ = std::move(fn); }
  void set_rollout_one(RolloutOneFn fn) { rollout_one_ = std::move(fn); }
  void set_rollout_step(RolloutStepFn fn) { rollout_step_ = std::move(fn); }
  void set_round_begin(RoundBeginFn fn) { round_begin_ = std::move(fn); }
  void set_first_action_observer(FirstActionObserver fn) {
    first_action_observer_ = std::move(fn);
  }

  const Game& game() const { return game_; }
  const SearchConfig& config() const { return cfg_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  int root_index() const { return root_; }

  void reset() {
    nodes_.clear();
    root_ = -1;
  }

  // Retains the subtree under the action just played (priors of retained
  // nodes are not re-injected); resets otherwise.
  void advance(const Action& played, const State& new_state) {
    if (root_ < 0) return;
    int next = -1;
    for (const Edge& e : nodes_[root_].edges) {
      if (e.action == played) {
        next = e.child;
        break;
      }
    }
    if (next >= 0 && nodes_[next].key == game_.state_key(new_state))
      root_ = next;
    else
      reset();
  }

  // Sequential loop: UCB1 select, expand one leaf, rollout, backup.
  Result uct_search(const State& root_state, long budget) {
    if (game_.is_terminal(root_state))
      throw std::invalid_argument("search from terminal position");
    if (budget <= 0) throw std::invalid_argument("zero search budget");
    auto t0 = std::chrono::steady_clock::now();
    ensure_root(root_state);
    for (long it = 0; it < budget; ++it) {
      Walk walk = explore(root_state, BanditKind::UCB1);
      double value = walk.leaf_terminal
                         ? game_.value(walk.leaf_state, explore_rng_)
                         : rollout_one_(std::move(walk.leaf_state), explore_rng_);
      backup(walk.steps, value);
    }
    return finish(t0, budget);
  }

  // Bulk-synchronous loop: batch exploration, synchronized batch rollout, batch
  // backup, repeated total_rollouts / B times.
  Result batch_search(const State& root_state) {
    if (game_.is_terminal(root_state))
      throw std::invalid_argument("search from terminal position");
    if (cfg_.batch_size <= 0 ||
        cfg_.total_rollouts % cfg_.batch_size != 0)
      throw std::invalid_argument(
          "total_rollouts must be a multiple of batch_size");
    const int B = cfg_.batch_size;
    const int rounds = cfg_.total_rollouts / B;
    auto t0 = std::chrono::steady_clock::now();
    ensure_root(root_state);

    std::vector<RngStream> lane_rngs;
    lane_rngs.reserve(B);
    for (int b = 0; b < B; ++b)
      lane_rngs.emplace_back(mix_seed(cfg_.seed, b));

    std::vector<Walk> walks(B, Walk(root_state));
    std::vector<State> states;
    std::vector<uint8_t> active(B);
    std::vector<Action> first_actions(B);

    for (int round = 0; round < rounds; ++round) {
      // Batch-Exploration: B tree walks, no backups in between.
      states.clear();
      for (int b = 0; b < B; ++b) {
        walks[b] = explore(root_state, cfg_.bandit);
        first_actions[b] = nodes_[root_].edges[walks[b].steps.front().second].action;
        states.push_back(walks[b].leaf_state);
        active[b] = !game_.is_terminal(states[b]);
      }
      if (first_action_observer_) first_action_observer_(round, first_actions);

      // Batch-Rollout: all lanes advance together; finished lanes hold.
      if (round_begin_) round_begin_(states);
      bool any_active = false;
      for (int b = 0; b < B; ++b) any_active |= active[b] != 0;
      while (any_active) {
        rollout_step_(states, active, lane_rngs);
        any_active = false;
        for (int b = 0; b < B; ++b) {
          if (active[b] && game_.is_terminal(states[b])) active[b] = 0;
          any_active |= active[b] != 0;
        }
      }

      // Batch-Backup.
      for (int b = 0; b < B; ++b)
        backup(walks[b].steps, game_.value(states[b], lane_rngs[b]));
    }
    return finish(t0, cfg_.total_rollouts);
  }

 private:
  struct Walk {
    std::vector<std::pair<int, int>> steps;  // (node index, edge index)
    State leaf_state;
    bool leaf_terminal = false;

    explicit Walk(const State& s) : leaf_state(s) {}
  };

  static uint64_t mix_seed(uint64_t seed, uint64_t lane) {
    uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (lane + 1);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  void ensure_root(const State& root_state) {
    if (root_ >= 0 && nodes_[root_].key == game_.state_key(root_state)) return;
    reset();
    root_ = expand(root_state);
  }

  int expand(const State& state) {
    Node node;
    node.key = game_.state_key(state);
    node.player = game_.player(state);
    node.terminal = game_.is_terminal(state);
    if (!node.terminal) {
      std::vector<Action> actions = game_.legal_actions(state);
      node.edges.reserve(actions.size());
      for (const Action& a : actions) node.edges.push_back(Edge{a});
      if (prior_fn_ && cfg_.prior_strength > 0.0 && !node.edges.empty()) {
        std::vector<double> probs = prior_fn_(state, actions);
        inject_priors(node.edges, probs, cfg_.prior_strength);
      }
    }
    nodes_.push_back(std::move(node));
    return static_cast<int>(nodes_.size()) - 1;
  }

  int select(const Node& node, BanditKind bandit) {
    // Edge stats are stored contiguously for the bandit calls.
    arm_buf_.clear();
    for (const Edge& e : node.edges) arm_buf_.push_back(e.stats);
    return bandit == BanditKind::UCB1
               ? ucb1_select(arm_buf_, cfg_.ucb_c)
               : thompson_select(arm_buf_, explore_rng_);
  }

  Walk explore(const State& root_state, BanditKind bandit) {
    Walk walk(root_state);
    int cur = root_;
    for (;;) {
      Node& node = nodes_[cur];
      if (node.terminal) {
        walk.leaf_terminal = true;
        return walk;
      }
      int j = select(node, bandit);
      walk.steps.emplace_back(cur, j);
      game_.apply(walk.leaf_state, node.edges[j].action);
      if (node.edges[j].child < 0) {
        int child = expand(walk.leaf_state);
        nodes_[cur].edges[j].child = child;  // expand may reallocate nodes_
        walk.leaf_terminal = nodes_[child].terminal;
        return walk;
      }
      cur = node.edges[j].child;
    }
  }

  // Reward orientation: each edge is credited from the perspective of the
  // player who made the move into the child.
  void backup(const std::vector<std::pair<int, int>>& steps, double value0) {
    for (const auto& [ni, ei] : steps) {
      Edge& e = nodes_[ni].edges[ei];
      e.stats.n += 1.0;
      e.stats.w += nodes_[ni].player == 0 ? value0 : 1.0 - value0;
    }
  }

  Result finish(std::chrono::steady_clock::time_point t0, long rollouts) {
    Result result;
    const Node& root = nodes_[root_];
    int best = 0;
    for (size_t j = 0; j < root.edges.size(); ++j) {
      result.root_visits.emplace_back(root.edges[j].action, root.edges[j].stats.n);
      if (root.edges[j].stats.n > root.edges[best].stats.n)
        best = static_cast<int>(j);
    }
    result.best = root.edges[best].action;
    if (root.edges[best].stats.n > 0)
      result.best_value = root.edges[best].stats.w / root.edges[best].stats.n;
    result.rollouts = rollouts;
    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    result.rollouts_per_sec =
        result.seconds > 0 ? rollouts / result.seconds : 0.0;
    return result;
  }

  Game game_;
  SearchConfig cfg_;
  RngStream explore_rng_;
  PriorFn prior_fn_;
  RolloutOneFn rollout_one_;
  RolloutStepFn rollout_step_;
  RoundBeginFn round_begin_;
  FirstActionObserver first_action_observer_;
  std::vector<Node> nodes_;
  int root_ = -1;
  std::vector<ArmStats> arm_buf_;
};

}  // namespace tengen
