#include "tengen/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace tengen {

TrainConfig train_preset(Arch arch) {
  TrainConfig cfg;
  switch (arch) {
    case Arch::A:
    case Arch::B:
      cfg.lr_initial = 0.01;
      cfg.schedule = {ScheduleKind::AnnealEveryNEpochs, 0.1, 2, 0.0, 0};
      cfg.momentum = 0.0;
      cfg.weight_decay = 0.0;
      cfg.epochs = 6;
      break;
    case Arch::C:
      cfg.lr_initial = 0.05;
      cfg.schedule = {ScheduleKind::Constant};
      cfg.momentum = 0.0;
      cfg.weight_decay = 0.0;
      cfg.epochs = 6;
      break;
    case Arch::R2:
    case Arch::R3:
      cfg.lr_initial = 0.1;
      cfg.schedule = {ScheduleKind::StepAtIteration, 0.0, 0, 0.01, 3200};
      cfg.momentum = 0.9;
      cfg.weight_decay = 0.0;
      cfg.epochs = 2;
      break;
  }
  return cfg;
}

std::string TrainReport::to_lines() const {
  std::ostringstream out;
  for (size_t i = 0; i < epochs.size(); ++i)
    out << "epoch=" << i << " loss=" << epochs[i].mean_loss
        << " holdout_acc=" << epochs[i].holdout_accuracy
        << " iters=" << epochs[i].iterations << "\n";
  return out.str();
}

TrainExample make_example(const Position& pos, const Move& mv) {
  if (mv.is_pass())
    throw std::invalid_argument("pass labels are excluded from training");
  TrainExample ex;
  ex.input = extract_features(pos);
  ex.mask.assign(pos.num_points(), 0);
  for (const Move& m : pos.legal_moves())
    if (!m.is_pass()) ex.mask[m.point] = 1;
  ex.label = mv.point;
  return ex;
}

namespace {

// Forward pass keeping every post-nonlinearity activation.
void forward_cached(const PolicyNet& net, const TrainExample& ex,
                    std::vector<std::vector<float>>& acts) {
  const int size = ex.input.size;
  const int n = size * size;
  acts.resize(net.layers.size() + 1);
  acts[0] = ex.input.planes;
  for (size_t li = 0; li < net.layers.size(); ++li) {
    const auto& spec = net.layers[li];
    acts[li + 1].assign(static_cast<size_t>(spec.out_ch) * n, 0.0f);
    conv2d(spec, net.weights[li].data(), net.biases[li].data(),
           acts[li].data(), acts[li + 1].data(), size);
    if (spec.has_relu)
      for (auto& v : acts[li + 1]) v = std::max(0.0f, v);
  }
}

// Loss and gradient for one example; dw/db accumulated unscaled.
double example_loss_grad(const PolicyNet& net, const TrainExample& ex,
                         std::vector<std::vector<float>>& dw,
                         std::vector<std::vector<float>>& db,
                         std::vector<std::vector<float>>& acts,
                         std::vector<float>& dy, std::vector<float>& dx) {
  const int size = ex.input.size;
  const int n = size * size;
  forward_cached(net, ex, acts);

  std::vector<float> probs(n);
  if (!masked_softmax(acts.back().data(), ex.mask.data(), n, probs.data()))
    throw std::invalid_argument("example with empty legal mask");
  double loss = -std::log(std::max(1e-30, static_cast<double>(probs[ex.label])));

  dy.assign(n, 0.0f);
  for (int i = 0; i < n; ++i)
    if (ex.mask[i]) dy[i] = probs[i];
  dy[ex.label] -= 1.0f;

  for (size_t li = net.layers.size(); li-- > 0;) {
    const auto& spec = net.layers[li];
    conv2d_backward_params(spec, acts[li].data(), dy.data(), dw[li].data(),
                           db[li].data(), size);
    if (li == 0) break;
    dx.assign(static_cast<size_t>(spec.in_ch) * n, 0.0f);
    conv2d_backward_input(spec, net.weights[li].data(), dy.data(), dx.data(),
                          size);
    if (net.layers[li - 1].has_relu) {
      const auto& a = acts[li];
      for (size_t i = 0; i < dx.size(); ++i)
        if (a[i] <= 0.0f) dx[i] = 0.0f;
    }
    dy = dx;
  }
  return loss;
}

}  // namespace

double loss_and_grad(const PolicyNet& net,
                     const std::vector<TrainExample>& batch,
                     std::vector<std::vector<float>>& dw,
                     std::vector<std::vector<float>>& db) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  std::vector<std::vector<float>> acts;
  std::vector<float> dy, dx;
  double total = 0.0;
  for (const auto& ex : batch)
    total += example_loss_grad(net, ex, dw, db, acts, dy, dx);
  const float scale = 1.0f / static_cast<float>(batch.size());
  for (auto& layer : dw)
    for (auto& v : layer) v *= scale;
  for (auto& layer : db)
    for (auto& v : layer) v *= scale;
  return total / batch.size();
}

double batch_loss(const PolicyNet& net,
                  const std::vector<TrainExample>& batch) {
  std::vector<std::vector<float>> acts;
  double total = 0.0;
  for (const auto& ex : batch) {
    const int n = ex.input.size * ex.input.size;
    forward_cached(net, ex, acts);
    std::vector<float> probs(n);
    masked_softmax(acts.back().data(), ex.mask.data(), n, probs.data());
    total += -std::log(std::max(1e-30, static_cast<double>(probs[ex.label])));
  }
  return total / batch.size();
}

double evaluate_accuracy(const PolicyNet& net,
                         const std::vector<TrainExample>& examples) {
  if (examples.empty()) return 0.0;
  long correct = 0;
#pragma omp parallel reduction(+ : correct)
  {
    std::vector<std::vector<float>> acts;
#pragma omp for schedule(static)
    for (long i = 0; i < static_cast<long>(examples.size()); ++i) {
      const auto& ex = examples[i];
      const int n = ex.input.size * ex.input.size;
      forward_cached(net, ex, acts);
      int best = -1;
      float best_v = 0.0f;
      for (int p = 0; p < n; ++p) {
        if (!ex.mask[p]) continue;
        if (best < 0 || acts.back()[p] > best_v) {
          best = p;
          best_v = acts.back()[p];
        }
      }
      if (best == ex.label) ++correct;
    }
  }
  return static_cast<double>(correct) / examples.size();
}

namespace {

// Positions are kept compact; tensors are rebuilt per minibatch.
struct CompactExample {
  std::vector<uint8_t> grid;
  std::vector<uint8_t> prev_prev_grid;
  Color to_move;
  int size;
  std::vector<uint8_t> mask;
  int label;
};

TrainExample expand(const CompactExample& c) {
  TrainExample ex;
  ex.input.size = c.size;
  const int n = c.size * c.size;
  ex.input.planes.assign(kFeaturePlanes * n, 0.0f);
  // Rebuild the two 8-plane groups exactly as extract_features does.
  auto fill = [&](const std::vector<uint8_t>& grid, float* out) {
    std::vector<int> libs = grid_chain_liberty_map(grid, c.size);
    const uint8_t own = static_cast<uint8_t>(c.to_move);
    for (int p = 0; p < n; ++p) {
      if (grid[p] == 0) continue;
      int slot = libs[p] >= 3 ? 2 : libs[p] - 1;
      if (grid[p] == own) {
        out[0 * n + p] = 1.0f;
        out[(2 + slot) * n + p] = 1.0f;
      } else {
        out[1 * n + p] = 1.0f;
        out[(5 + slot) * n + p] = 1.0f;
      }
    }
  };
  fill(c.grid, ex.input.planes.data());
  fill(c.prev_prev_grid, ex.input.planes.data() + 8 * n);
  ex.mask = c.mask;
  ex.label = c.label;
  return ex;
}

double lr_at(const TrainConfig& cfg, int epoch, long iteration) {
  switch (cfg.schedule.kind) {
    case ScheduleKind::Constant:
      return cfg.lr_initial;
    case ScheduleKind::AnnealEveryNEpochs:
      return cfg.lr_initial *
             std::pow(cfg.schedule.factor, epoch / cfg.schedule.every_n_epochs);
    case ScheduleKind::StepAtIteration:
      return iteration < cfg.schedule.step_iteration ? cfg.lr_initial
                                                     : cfg.schedule.step_lr;
  }
  return cfg.lr_initial;
}

}  // namespace

TrainReport train(PolicyNet& net, const std::vector<TrainingPair>& dataset,
                  const TrainConfig& cfg) {
  if (dataset.empty()) throw std::invalid_argument("empty dataset");
  // lr 0 is allowed and leaves parameters untouched (useful for testing).
  if (cfg.lr_initial < 0.0) throw std::invalid_argument("lr_initial < 0");
  if (cfg.momentum < 0.0 || cfg.momentum >= 1.0)
    throw std::invalid_argument("momentum out of [0,1)");
  if (cfg.weight_decay < 0.0) throw std::invalid_argument("weight_decay < 0");

  std::vector<CompactExample> examples;
  examples.reserve(dataset.size());
  for (const auto& pair : dataset) {
    if (pair.move.is_pass())
      throw std::invalid_argument("pass labels are excluded from training");
    TrainExample ex = make_example(pair.position, pair.move);
    CompactExample c;
    c.grid = pair.position.grid();
    c.prev_prev_grid = pair.position.prev_prev_grid();
    c.to_move = pair.position.to_move();
    c.size = pair.position.size();
    c.mask = std::move(ex.mask);
    c.label = ex.label;
    examples.push_back(std::move(c));
  }

  std::mt19937_64 gen(cfg.seed);
  std::vector<size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), gen);
  size_t holdout_n = static_cast<size_t>(examples.size() * cfg.holdout_fraction);
  std::vector<size_t> train_idx(order.begin(), order.end() - holdout_n);
  std::vector<TrainExample> holdout;
  for (size_t i = order.size() - holdout_n; i < order.size(); ++i)
    holdout.push_back(expand(examples[order[i]]));

  std::vector<std::vector<float>> velocity_w, velocity_b, dw, db;
  for (size_t li = 0; li < net.layers.size(); ++li) {
    velocity_w.emplace_back(net.weights[li].size(), 0.0f);
    velocity_b.emplace_back(net.biases[li].size(), 0.0f);
    dw.emplace_back(net.weights[li].size(), 0.0f);
    db.emplace_back(net.biases[li].size(), 0.0f);
  }

  TrainReport report;
  long iteration = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), gen);
    double loss_sum = 0.0;
    long batches = 0;
    for (size_t start = 0; start < train_idx.size();
         start += cfg.batch_size) {
      size_t end = std::min(train_idx.size(),
                            start + static_cast<size_t>(cfg.batch_size));
      std::vector<TrainExample> batch;
      batch.reserve(end - start);
      for (size_t i = start; i < end; ++i) {
        TrainExample ex = expand(examples[train_idx[i]]);
        if (cfg.augment) {
          int sym = static_cast<int>(gen() % 8);
          ex.input = transform_tensor(ex.input, sym);
          std::vector<uint8_t> m(ex.mask.size(), 0);
          for (size_t p = 0; p < ex.mask.size(); ++p)
            if (ex.mask[p])
              m[transform_point(static_cast<Point>(p), ex.input.size, sym)] = 1;
          ex.mask = std::move(m);
          ex.label = transform_point(static_cast<Point>(ex.label),
                                     ex.input.size, sym);
        }
        batch.push_back(std::move(ex));
      }
      for (auto& layer : dw) std::fill(layer.begin(), layer.end(), 0.0f);
      for (auto& layer : db) std::fill(layer.begin(), layer.end(), 0.0f);
      loss_sum += loss_and_grad(net, batch, dw, db);
      ++batches;
      const double lr = lr_at(cfg, epoch, iteration);
      for (size_t li = 0; li < net.layers.size(); ++li) {
        for (size_t k = 0; k < net.weights[li].size(); ++k) {
          float g = dw[li][k] +
                    static_cast<float>(cfg.weight_decay) * net.weights[li][k];
          velocity_w[li][k] = static_cast<float>(cfg.momentum) *
                                  velocity_w[li][k] -
                              static_cast<float>(lr) * g;
          net.weights[li][k] += velocity_w[li][k];
        }
        for (size_t k = 0; k < net.biases[li].size(); ++k) {
          velocity_b[li][k] = static_cast<float>(cfg.momentum) *
                                  velocity_b[li][k] -
                              static_cast<float>(lr) * db[li][k];
          net.biases[li][k] += velocity_b[li][k];
        }
      }
      ++iteration;
    }
    EpochStats stats;
    stats.mean_loss = batches > 0 ? loss_sum / batches : 0.0;
    stats.holdout_accuracy = evaluate_accuracy(net, holdout);
    stats.iterations = iteration;
    report.epochs.push_back(stats);
  }
  report.total_iterations = iteration;
  return report;
}

}  // namespace tengen
