#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tengen/policy_net.hpp"
#include "tengen/sgf.hpp"

namespace tengen {

enum class ScheduleKind { Constant, AnnealEveryNEpochs, StepAtIteration };

struct TrainSchedule {
  ScheduleKind kind = ScheduleKind::Constant;
  double factor = 0.1;       // AnnealEveryNEpochs
  int every_n_epochs = 2;    // AnnealEveryNEpochs
  double step_lr = 0.01;     // StepAtIteration
  long step_iteration = 3200;
};

struct TrainConfig {
  double lr_initial = 0.01;
  TrainSchedule schedule;
  double momentum = 0.0;
  double weight_decay = 0.0;
  int batch_size = 16;  // one iteration = one minibatch update
  int epochs = 2;
  uint64_t seed = 1;
  double holdout_fraction = 0.1;
  bool augment = false;  // 8 board symmetries, off by default
};

// Per-architecture protocols: A/B lr 0.01 annealed x0.1 every 2 epochs;
// C lr 0.05 constant; R-2/R-3 lr 0.1 stepping to 0.01 at iteration 3200
// with momentum 0.9. No weight decay anywhere.
TrainConfig train_preset(Arch arch);

struct EpochStats {
  double mean_loss = 0.0;
  double holdout_accuracy = 0.0;
  long iterations = 0;  // cumulative
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  long total_iterations = 0;

  // Line-delimited "epoch=<i> loss=<l> holdout_acc=<a> iters=<n>".
  std::string to_lines() const;
};

struct TrainExample {
  FeatureTensor input;
  std::vector<uint8_t> mask;  // legal points
  int label = 0;              // point index of the expert move
};

// Throws std::invalid_argument on a pass label.
TrainExample make_example(const Position& pos, const Move& mv);

// Mean masked cross-entropy over the batch plus its gradients; dw/db are
// accumulated (caller zeroes). Exposed for the finite-difference checks.
double loss_and_grad(const PolicyNet& net,
                     const std::vector<TrainExample>& batch,
                     std::vector<std::vector<float>>& dw,
                     std::vector<std::vector<float>>& db);

double batch_loss(const PolicyNet& net, const std::vector<TrainExample>& batch);

// Top-1 accuracy of the masked argmax against the labels.
double evaluate_accuracy(const PolicyNet& net,
                         const std::vector<TrainExample>& examples);

// Momentum SGD over (position, expert move) pairs; deterministic given
// cfg.seed. Throws on an empty dataset or a pass label.
TrainReport train(PolicyNet& net, const std::vector<TrainingPair>& dataset,
                  const TrainConfig& cfg);

}  // namespace tengen
