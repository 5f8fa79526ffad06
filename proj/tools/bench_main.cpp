#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>

#include "tengen/arena.hpp"
#include "tengen/go_search.hpp"

using namespace tengen;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// OpenMP forward_batch against the plain-loop serial reference.
void bench_forward(Arch arch, int board_size, int batch, int reps) {
  PolicyNet net = build_architecture(arch, board_size);
  glorot_init(net, 42);
  const int n = board_size * board_size;
  std::mt19937_64 gen(3);
  std::vector<FeatureTensor> inputs(batch);
  std::vector<std::vector<uint8_t>> masks(batch);
  for (int b = 0; b < batch; ++b) {
    inputs[b].size = board_size;
    inputs[b].planes.resize(static_cast<size_t>(net.input_planes) * n);
    for (auto& v : inputs[b].planes) v = gen() % 4 == 0 ? 1.0f : 0.0f;
    masks[b].assign(n, 1);
  }

  forward_batch(net, inputs, masks);  // warmup
  auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) forward_batch(net, inputs, masks);
  double par = seconds_since(t0);

  forward_batch_serial(net, inputs, masks);
  t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) forward_batch_serial(net, inputs, masks);
  double ser = seconds_since(t0);

  double positions = static_cast<double>(reps) * batch;
  std::printf(
      "forward %-3s %2dx%-2d batch %3d: parallel %8.1f pos/s   serial %8.1f "
      "pos/s   speedup %.2fx\n",
      arch_to_string(arch).c_str(), board_size, board_size, batch,
      positions / par, positions / ser, ser / par);
}

// Batched calls against the same work issued one position at a time.
void bench_batch_vs_single(int board_size, int total) {
  PolicyNet net = build_architecture(Arch::R2, board_size);
  glorot_init(net, 42);
  double batched = measure_positions_per_sec(net, board_size, 64, total);
  double single = measure_positions_per_sec(net, board_size, 1, total);
  std::printf(
      "R-2 %dx%d, %d positions: batch-64 %8.1f pos/s   batch-1 %8.1f pos/s   "
      "speedup %.2fx\n",
      board_size, board_size, total, batched, single, batched / single);
}

void bench_search(int board_size, int rollouts, int batch, bool use_rpn) {
  SearchConfig cfg;
  cfg.total_rollouts = rollouts;
  cfg.batch_size = batch;
  cfg.prior_strength = 0;
  cfg.seed = 7;
  PolicyNet rpn;
  const PolicyNet* rpn_ptr = nullptr;
  if (use_rpn) {
    rpn = build_architecture(Arch::R2, board_size);
    glorot_init(rpn, 42);
    cfg.rollout_policy = RolloutKind::Network;
    rpn_ptr = &rpn;
  }
  Position pos(board_size);
  ThroughputReport report = measure_throughput(cfg, pos, nullptr, rpn_ptr);
  std::printf("search %dx%d B=%d rollouts=%d %-7s: %8.1f rollouts/s\n",
              board_size, board_size, batch, rollouts,
              use_rpn ? "network" : "uniform", report.rollouts_per_sec);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tengen throughput benchmarks"};
  int board_size = 19;
  int reps = 4;
  int rollouts = 512;
  bool quick = false;
  app.add_option("--size", board_size, "board size");
  app.add_option("--reps", reps, "forward-pass repetitions");
  app.add_option("--rollouts", rollouts, "search rollouts per config");
  app.add_flag("--quick", quick, "small configs only");
  CLI11_PARSE(app, argc, argv);

  bench_forward(Arch::R2, board_size, 64, reps);
  bench_forward(Arch::R3, board_size, 64, reps);
  if (!quick) bench_forward(Arch::A, board_size, 16, 1);

  bench_batch_vs_single(board_size, 256);

  bench_search(9, rollouts, 32, false);
  bench_search(9, rollouts, 32, true);
  return 0;
}
