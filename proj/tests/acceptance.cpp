// Release gate: one check per shipped guarantee, one PASS/FAIL line each.
// Runs standalone (no test framework) so the output is easy to scrape.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tengen/arena.hpp"
#include "tengen/trainer.hpp"

using namespace tengen;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// ---------------------------------------------------------------- 1 -------
// Rules engine vs brute-force oracle over 10,000 random 5x5 games.
bool check_rules_oracle(std::string& detail) {
  const int kGames = 10000, kSize = 5, kPoints = kSize * kSize;
  double t0 = now_seconds();
  std::mt19937_64 gen(12345);
  long moves_checked = 0;
  for (int game = 0; game < kGames; ++game) {
    Position pos(kSize);
    oracle::Grid grid(kPoints, 0);
    std::vector<oracle::Grid> past_grids{grid};
    std::vector<uint8_t> past_to_move{1};
    while (!pos.is_terminal()) {
      Color c = pos.to_move();
      uint8_t oc = c == Color::Black ? 1 : 2;
      for (Point p = 0; p < kPoints; ++p) {
        bool lib_legal = pos.is_legal(Move::play(c, p), true);
        bool ora_legal = oracle::legal_with_history(grid, kSize, p, oc,
                                                    past_grids, past_to_move);
        if (lib_legal != ora_legal) {
          detail = "legality mismatch, game " + std::to_string(game) +
                   " point " + std::to_string(p);
          return false;
        }
      }
      std::vector<Move> legal = pos.legal_moves(true);
      Move mv = legal[gen() % legal.size()];
      pos.apply(mv, true);
      if (!mv.is_pass()) {
        auto next = oracle::try_play(grid, kSize, mv.point, oc);
        if (!next) {
          detail = "oracle rejected an engine-legal move";
          return false;
        }
        grid = *next;
      }
      for (Point p = 0; p < kPoints; ++p) {
        if (static_cast<uint8_t>(pos.at(p)) != grid[p]) {
          detail = "capture resolution mismatch, game " + std::to_string(game);
          return false;
        }
      }
      past_grids.push_back(grid);
      past_to_move.push_back(oc == 1 ? 2 : 1);
      ++moves_checked;
    }
    double lib_score = pos.tromp_taylor_score(2.5);
    double ora_score = oracle::tromp_taylor(grid, kSize, 2.5);
    if (std::abs(lib_score - ora_score) > 1e-9) {
      detail = "score mismatch, game " + std::to_string(game);
      return false;
    }
  }
  double secs = now_seconds() - t0;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%d games, %ld moves, %.1fs", kGames,
                moves_checked, secs);
  detail = buf;
  return secs < 60.0;
}

// ---------------------------------------------------------------- 2 -------
// 5120-rollout batch accounting at three (B, rounds) splits, with prior
// pseudo-counts injected at every node and subtracted back out at the root.
bool check_batch_accounting(std::string& detail) {
  PolicyNet ppn;
  ppn.layers = {LayerSpec{kFeaturePlanes, 1, 3, 3, false}};
  ppn.weights = {std::vector<float>(ppn.layers[0].weight_count(), 0.0f)};
  ppn.biases = {std::vector<float>(1, 0.0f)};

  for (int batch : {64, 128, 256}) {
    SearchConfig cfg;
    cfg.total_rollouts = 5120;
    cfg.batch_size = batch;
    cfg.bandit = BanditKind::Thompson;
    cfg.prior_strength = 16.0;
    cfg.seed = 40 + batch;
    GoSearcher searcher(cfg, &ppn, nullptr);
    GoSearchResult result = searcher.search(Position(9));
    if (result.rollouts != 5120) {
      detail = "B=" + std::to_string(batch) + " executed " +
               std::to_string(result.rollouts) + " rollouts";
      return false;
    }
    double n_sum = 0.0;
    for (const auto& [mv, n] : result.root_visits) n_sum += n;
    double real_trials = n_sum - 16.0 * double(result.root_visits.size());
    if (std::abs(real_trials - 5120.0) > 1e-9) {
      detail = "B=" + std::to_string(batch) + " root trial sum " +
               std::to_string(real_trials);
      return false;
    }
  }
  detail = "(64,80) (128,40) (256,20), all exactly 5120";
  return true;
}

// ---------------------------------------------------------------- 3 -------
// First-action diversity within one backup-free batch at the empty 9x9 root.
bool check_batch_diversity(std::string& detail) {
  auto distinct_first_actions = [](BanditKind kind, uint64_t seed) {
    SearchConfig cfg;
    cfg.total_rollouts = 64;  // one round: no backups between lane walks
    cfg.batch_size = 64;
    cfg.bandit = kind;
    cfg.seed = seed;
    GoSearcher searcher(cfg);
    std::set<int> distinct;
    searcher.core().set_first_action_observer(
        [&](int round, const std::vector<Move>& actions) {
          if (round != 0) return;
          for (const Move& mv : actions) distinct.insert(mv.point);
        });
    searcher.search(Position(9));
    return static_cast<int>(distinct.size());
  };

  int ucb_single = 0, thompson_diverse = 0;
  for (uint64_t run = 0; run < 100; ++run) {
    if (distinct_first_actions(BanditKind::UCB1, 500 + run) == 1) ++ucb_single;
    if (distinct_first_actions(BanditKind::Thompson, 900 + run) >= 2)
      ++thompson_diverse;
  }
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "UCB1 single-action runs %d/100, Thompson diverse runs %d/100",
                ucb_single, thompson_diverse);
  detail = buf;
  return ucb_single == 100 && thompson_diverse >= 99;
}

// ---------------------------------------------------------------- 4 -------
// 10-arm Bernoulli bandit: both rules find the best arm (margin 0.15).
bool check_bandit_regret(std::string& detail) {
  const std::vector<double> ps = {0.10, 0.14, 0.18, 0.22, 0.26,
                                  0.30, 0.34, 0.55, 0.38, 0.40};
  const int best = 7;
  const long kPulls = 20000;
  double t0 = now_seconds();

  auto run_policy = [&](bool use_thompson) {
    double rate_sum = 0.0;
    for (uint64_t seed = 1; seed <= 50; ++seed) {
      RngStream rng(seed);
      std::mt19937_64 reward_gen(seed * 77 + 1);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::vector<ArmStats> arms(ps.size());
      long best_in_window = 0;
      for (long pull = 0; pull < kPulls; ++pull) {
        int j = use_thompson ? thompson_select(arms, rng)
                             : ucb1_select(arms, kDefaultUcbC);
        arms[j].n += 1.0;
        if (unit(reward_gen) < ps[j]) arms[j].w += 1.0;
        if (pull >= kPulls - 1000 && j == best) ++best_in_window;
      }
      rate_sum += best_in_window / 1000.0;
    }
    return rate_sum / 50.0;
  };

  double ucb_rate = run_policy(false);
  double thompson_rate = run_policy(true);
  double secs = now_seconds() - t0;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "pulls 19001-20000 on best arm: UCB1 %.1f%%, Thompson %.1f%%, "
                "%.1fs",
                100.0 * ucb_rate, 100.0 * thompson_rate, secs);
  detail = buf;
  return ucb_rate >= 0.90 && thompson_rate >= 0.90 && secs < 30.0;
}

// ---------------------------------------------------------------- 5 -------
// forward_batch vs the nested-loop oracle on 100 random nets and inputs.
bool check_inference(std::string& detail) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<float> wdist(-0.5f, 0.5f);
  const int kSize = 9, kPoints = kSize * kSize;

  for (int trial = 0; trial < 100; ++trial) {
    PolicyNet net;
    int layers = 1 + int(gen() % 3);
    int in_ch = 1 + int(gen() % 4);
    net.input_planes = in_ch;
    int prev = in_ch;
    for (int l = 0; l < layers; ++l) {
      bool last = l == layers - 1;
      int out = last ? 1 : 1 + int(gen() % 6);
      int k = 1 + 2 * int(gen() % 3);
      LayerSpec spec{prev, out, k, k, !last};
      net.layers.push_back(spec);
      net.weights.emplace_back(spec.weight_count());
      net.biases.emplace_back(out);
      for (auto& v : net.weights.back()) v = wdist(gen);
      for (auto& v : net.biases.back()) v = wdist(gen);
      prev = out;
    }

    FeatureTensor input;
    input.size = kSize;
    input.planes.resize(static_cast<size_t>(in_ch) * kPoints);
    for (auto& v : input.planes) v = wdist(gen) * 2.0f;
    std::vector<uint8_t> mask(kPoints);
    for (auto& m : mask) m = gen() % 3 != 0;
    mask[gen() % kPoints] = 1;  // at least one legal point

    auto got = forward_batch(net, {input}, {mask});

    // Oracle: direct convolutions, then a double-precision masked softmax.
    std::vector<float> act = input.planes;
    for (size_t l = 0; l < net.layers.size(); ++l) {
      const LayerSpec& spec = net.layers[l];
      act = oracle::conv_direct(act, spec.in_ch, spec.out_ch, spec.kh, spec.kw,
                                net.weights[l], net.biases[l], kSize,
                                spec.has_relu);
    }
    double max_logit = -1e300;
    for (int p = 0; p < kPoints; ++p)
      if (mask[p] && act[p] > max_logit) max_logit = act[p];
    std::vector<double> expect(kPoints, 0.0);
    double denom = 0.0;
    for (int p = 0; p < kPoints; ++p)
      if (mask[p]) denom += std::exp(double(act[p]) - max_logit);
    for (int p = 0; p < kPoints; ++p)
      if (mask[p]) expect[p] = std::exp(double(act[p]) - max_logit) / denom;

    double sum = 0.0;
    for (int p = 0; p < kPoints; ++p) {
      double a = got[0].probs[p];
      sum += a;
      if (!mask[p]) {
        if (a != 0.0) {
          detail = "nonzero probability at a masked point";
          return false;
        }
        continue;
      }
      double rel = std::abs(a - expect[p]) / std::max(expect[p], 1e-6);
      if (rel > 1e-5) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "trial %d rel error %.2e", trial, rel);
        detail = buf;
        return false;
      }
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      detail = "softmax sum " + std::to_string(sum);
      return false;
    }
  }
  detail = "100 random nets within 1e-5 relative";
  return true;
}

// ---------------------------------------------------------------- 6 -------
// Gradient check on both layer types, then R-2 on a 100-game corpus.
bool check_training(std::string& detail) {
  double t0 = now_seconds();

  const int kSize = 5, kPoints = kSize * kSize;
  PolicyNet net;
  std::vector<TrainExample> batch;
  auto build_fixture = [&](uint64_t seed) {
    net = PolicyNet{};
    net.input_planes = 2;
    for (const LayerSpec spec :
         {LayerSpec{2, 3, 3, 3, true}, LayerSpec{3, 2, 3, 3, true},
          LayerSpec{2, 1, 3, 3, false}}) {
      net.layers.push_back(spec);
      net.weights.emplace_back(spec.weight_count());
      net.biases.emplace_back(spec.out_ch);
    }
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<float> wdist(-0.4f, 0.4f);
    for (auto& layer : net.weights)
      for (auto& v : layer) v = wdist(gen);
    for (auto& layer : net.biases)
      for (auto& v : layer) v = wdist(gen);
    batch.assign(2, TrainExample{});
    for (auto& ex : batch) {
      ex.input.size = kSize;
      ex.input.planes.resize(2 * kPoints);
      for (auto& v : ex.input.planes) v = gen() % 2 ? 1.0f : 0.0f;
      ex.mask.assign(kPoints, 0);
      for (int p = 0; p < kPoints; ++p) ex.mask[p] = gen() % 2;
      ex.mask[3] = 1;
      ex.label = 3;
    }
  };
  // Central differences are only valid away from ReLU kinks; screen the
  // fixture so no pre-activation sits inside the probe interval.
  auto min_preact = [&] {
    double best = 1e9;
    for (const auto& ex : batch) {
      std::vector<float> cur = ex.input.planes, next;
      for (size_t li = 0; li < net.layers.size(); ++li) {
        const auto& spec = net.layers[li];
        next.assign(static_cast<size_t>(spec.out_ch) * kPoints, 0.0f);
        conv2d(spec, net.weights[li].data(), net.biases[li].data(), cur.data(),
               next.data(), kSize);
        if (spec.has_relu) {
          for (float v : next) best = std::min(best, double(std::abs(v)));
          for (auto& v : next) v = std::max(0.0f, v);
        }
        cur = next;
      }
    }
    return best;
  };
  build_fixture(5);
  for (uint64_t seed = 6; min_preact() < 0.02 && seed < 256; ++seed)
    build_fixture(seed);
  if (min_preact() < 0.02) {
    detail = "no kink-free gradcheck fixture found";
    return false;
  }

  std::vector<std::vector<float>> dw, db;
  for (const auto& layer : net.weights) dw.emplace_back(layer.size(), 0.0f);
  for (const auto& layer : net.biases) db.emplace_back(layer.size(), 0.0f);
  loss_and_grad(net, batch, dw, db);

  const float h = 2e-3f;  // below the screened kink distance
  auto check_param = [&](std::vector<float>& param, size_t i, float analytic) {
    float saved = param[i];
    param[i] = saved + h;
    double up = batch_loss(net, batch);
    param[i] = saved - h;
    double down = batch_loss(net, batch);
    param[i] = saved;
    double numeric = (up - down) / (2.0 * h);
    // Relative with a unit floor: float forward noise dominates once both
    // gradients are near zero.
    return std::abs(analytic - numeric) /
           std::max(1.0, std::abs(analytic) + std::abs(numeric));
  };
  std::mt19937_64 pick(31);
  for (size_t l = 0; l < net.layers.size(); ++l) {
    for (int s = 0; s < 12; ++s) {
      size_t i = pick() % net.weights[l].size();
      double err = check_param(net.weights[l], i, dw[l][i]);
      if (err > 1e-3) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "weight grad layer %zu err %.2e", l, err);
        detail = buf;
        return false;
      }
    }
    for (size_t i = 0; i < net.biases[l].size(); ++i) {
      double err = check_param(net.biases[l], i, db[l][i]);
      if (err > 1e-3) {
        detail = "bias gradient mismatch in layer " + std::to_string(l);
        return false;
      }
    }
  }

  // 100-game corpus, 90/10 game-independent holdout inside train().
  std::vector<TrainingPair> dataset;
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    SgfGame game = generate_synthetic_game(seed, 19, 5.5, 80);
    ReplayResult replay = to_training_pairs(game);
    dataset.insert(dataset.end(), replay.pairs.begin(), replay.pairs.end());
  }
  PolicyNet r2 = build_architecture(Arch::R2, 19);
  glorot_init(r2, 7);
  TrainConfig cfg = train_preset(Arch::R2);
  TrainReport report = train(r2, dataset, cfg);
  double acc = report.epochs.back().holdout_accuracy;
  double secs = now_seconds() - t0;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "gradients ok; R-2 holdout top-1 %.2f%% on %zu pairs "
                "(uniform baseline 0.28%%), %.0fs",
                100.0 * acc, dataset.size(), secs);
  detail = buf;
  return acc > 0.028 && secs < 1800.0;
}

// ---------------------------------------------------------------- 7 -------
// 9x9 Thompson MCTS (1024 rollouts, B=32, no priors) vs a random mover.
bool check_playing_strength(std::string& detail) {
  double t0 = now_seconds();
  MatchConfig cfg;
  cfg.engine_a.name = "mcts";
  cfg.engine_a.inproc.search.total_rollouts = 1024;
  cfg.engine_a.inproc.search.batch_size = 32;
  cfg.engine_a.inproc.search.bandit = BanditKind::Thompson;
  cfg.engine_b.name = "random";
  cfg.engine_b.inproc.random_mover = true;
  cfg.games = 100;
  cfg.size = 9;
  cfg.komi = 7.5;
  cfg.seed = 11;
  MatchReport report = run_match(cfg);
  double secs = now_seconds() - t0;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%d/%d wins vs random (%d draws), %.0fs",
                report.wins_a, cfg.games, report.draws, secs);
  detail = buf;
  return report.wins_a >= 95 && secs < 1200.0;
}

// ---------------------------------------------------------------- 8 -------
bool check_std_error(std::string& detail) {
  double se = binomial_std_error(0.644, 200);
  char buf[64];
  std::snprintf(buf, sizeof buf, "se(0.644, 200) = %.6f", se);
  detail = buf;
  return std::abs(se - 0.0339) <= 1e-4;
}

// ---------------------------------------------------------------- 9 -------
// Same (position, config, seed) twice: identical results except timing.
bool check_reproducibility(std::string& detail) {
  Position pos(9);
  std::mt19937_64 gen(3);
  for (int i = 0; i < 10; ++i) {
    std::vector<Move> legal = pos.legal_moves();
    pos.apply(legal[gen() % legal.size()]);
  }
  PolicyNet ppn = build_architecture(Arch::R2, 9);
  glorot_init(ppn, 21);

  SearchConfig cfg;
  cfg.total_rollouts = 512;
  cfg.batch_size = 32;
  cfg.bandit = BanditKind::Thompson;
  cfg.seed = 5;
  auto run = [&] {
    GoSearcher searcher(cfg, &ppn, nullptr);
    return searcher.search(pos);
  };
  GoSearchResult a = run(), b = run();
  bool same = a.best == b.best && a.best_value == b.best_value &&
              a.rollouts == b.rollouts &&
              a.root_visits.size() == b.root_visits.size();
  if (same)
    for (size_t j = 0; j < a.root_visits.size(); ++j)
      same = same && a.root_visits[j].first == b.root_visits[j].first &&
             a.root_visits[j].second == b.root_visits[j].second;
  detail = same ? "two runs identical (timing fields excluded)"
                : "runs diverged";
  return same;
}

// --------------------------------------------------------------- 10 -------
// Byte-exact golden transcript, then genmove legality on random positions.
bool check_gtp(std::string& detail) {
  static const std::pair<const char*, const char*> kTranscript[] = {
      {"protocol_version", "= 2\n\n"},
      {"1 protocol_version", "=1 2\n\n"},
      {"name", "= tengen\n\n"},
      {"version", "= 0.1\n\n"},
      {"known_command genmove", "= true\n\n"},
      {"known_command frobnicate", "= false\n\n"},
      {"list_commands",
       "= protocol_version\nname\nversion\nknown_command\nlist_commands\n"
       "boardsize\nclear_board\nkomi\nplay\ngenmove\nfinal_score\n"
       "time_settings\nquit\n\n"},
      {"boardsize 9", "=\n\n"},
      {"komi 5.5", "=\n\n"},
      {"clear_board", "=\n\n"},
      {"2 play b E5", "=2\n\n"},
      {"play w C3", "=\n\n"},
      {"play b G3", "=\n\n"},
      {"play w C5", "=\n\n"},
      {"play b E5", "? illegal move\n\n"},
      {"play purple E3", "? illegal move\n\n"},
      {"play b Z1", "? illegal move\n\n"},
      {"3 play w pass", "=3\n\n"},
      {"play b E3", "=\n\n"},
      {"final_score", "= W+4.5\n\n"},
      {"time_settings 300 10 5", "=\n\n"},
      {"boardsize 100", "? unacceptable size\n\n"},
      {"boardsize foo", "? unacceptable size\n\n"},
      {"komi", "? komi not a float\n\n"},
      {"frobnicate", "? unknown command\n\n"},
      {"9 frobnicate", "?9 unknown command\n\n"},
      {"known_command", "= false\n\n"},
      {"boardsize 5", "=\n\n"},
      {"play b A1", "=\n\n"},
      {"play w B1", "=\n\n"},
      {"play w A2", "=\n\n"},
      {"play b A1", "? illegal move\n\n"},
      {"final_score", "= W+30.5\n\n"},
      {"clear_board", "=\n\n"},
      {"final_score", "= W+5.5\n\n"},
      {"10 known_command quit", "=10 true\n\n"},
      {"play w pass", "=\n\n"},
      {"play b C3", "=\n\n"},
      {"4 final_score", "=4 B+19.5\n\n"},
      {"quit", "=\n\n"},
  };

  EngineOptions opts;
  opts.board_size = 9;
  opts.search.total_rollouts = 64;
  opts.search.batch_size = 16;
  EngineSession golden(opts);
  int commands = 0;
  for (const auto& [line, expect] : kTranscript) {
    std::string got = golden.handle_line(line);
    ++commands;
    if (got != expect) {
      detail = std::string("transcript diverged at `") + line + "`: got \"" +
               got + "\"";
      return false;
    }
  }

  std::mt19937_64 gen(606);
  for (int trial = 0; trial < 50; ++trial) {
    EngineOptions topts = opts;
    topts.search.seed = 7000 + trial;
    EngineSession session(topts);
    Position referee(9);
    int prefix = 4 + int(gen() % 30);
    for (int i = 0; i < prefix && !referee.is_terminal(); ++i) {
      std::vector<Move> legal = referee.legal_moves();
      Move mv = legal[gen() % legal.size()];
      if (mv.is_pass()) continue;
      std::string cmd = std::string("play ") +
                        (mv.color == Color::Black ? "b " : "w ") +
                        vertex_to_string(mv.point, 9);
      if (session.handle_line(cmd) != "=\n\n") {
        detail = "setup play rejected: " + cmd;
        return false;
      }
      referee.set_to_move(mv.color);
      referee.apply(mv);
    }
    if (referee.is_terminal()) continue;
    Color c = referee.to_move();
    std::string reply = session.handle_line(
        std::string("genmove ") + (c == Color::Black ? "b" : "w"));
    if (reply.size() < 4 || reply.substr(0, 2) != "= ") {
      detail = "genmove failed: " + reply;
      return false;
    }
    std::string vertex = reply.substr(2, reply.size() - 4);
    if (vertex == "resign") continue;
    Move mv = vertex == "pass" ? Move::pass(c)
                               : Move::play(c, vertex_from_string(vertex, 9));
    if (!referee.is_legal(mv)) {
      detail = "illegal genmove " + vertex + " in trial " +
               std::to_string(trial);
      return false;
    }
  }
  detail = std::to_string(commands) +
           "-command transcript byte-exact; 50 genmoves legal";
  return true;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<bool(std::string&)> run;
  };
  const std::vector<Criterion> criteria = {
      {"rules-oracle equivalence", check_rules_oracle},
      {"batch accounting identity", check_batch_accounting},
      {"batch first-action diversity", check_batch_diversity},
      {"bandit regret", check_bandit_regret},
      {"inference correctness", check_inference},
      {"training sanity", check_training},
      {"playing strength vs random", check_playing_strength},
      {"standard-error machinery", check_std_error},
      {"search reproducibility", check_reproducibility},
      {"GTP conformance", check_gtp},
  };

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    std::string detail;
    bool ok = false;
    try {
      ok = criteria[i].run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %2zu %-32s %s%s%s\n", i + 1, criteria[i].name,
                ok ? "PASS" : "FAIL", detail.empty() ? "" : "  -- ",
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
