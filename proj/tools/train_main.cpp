#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "tengen/sgf.hpp"
#include "tengen/trainer.hpp"

using namespace tengen;

int main(int argc, char** argv) {
  CLI::App app{"tengen policy-network trainer"};
  app.require_subcommand(1);

  // train: fit a network on an SGF corpus and save its weights.
  auto* train_cmd = app.add_subcommand("train", "train a policy network");
  std::string arch_name = "R2", corpus_dir, out_path = "weights.cpnw";
  std::string manifest_path;
  int epochs_override = -1, board_size = 19;
  double lr_override = -1.0;
  uint64_t seed = 1;
  bool augment = false;
  train_cmd->add_option("--arch", arch_name, "A, B, C, R2 or R3");
  train_cmd->add_option("--corpus", corpus_dir, "directory of .sgf files")
      ->required();
  train_cmd->add_option("--out", out_path, "weight file to write");
  train_cmd->add_option("--manifest", manifest_path,
                        "write the accept/reject manifest here");
  train_cmd->add_option("--epochs", epochs_override, "override preset epochs");
  train_cmd->add_option("--lr", lr_override, "override preset learning rate");
  train_cmd->add_option("--seed", seed, "training seed");
  train_cmd->add_flag("--augment", augment, "8-symmetry data augmentation");
  train_cmd->add_option("--size", board_size,
                        "board size the corpus filter accepts");

  // make-corpus: emit a synthetic SGF corpus for smoke training.
  auto* gen_cmd =
      app.add_subcommand("make-corpus", "generate synthetic SGF games");
  std::string gen_dir;
  int gen_games = 100;
  uint64_t gen_seed = 1;
  gen_cmd->add_option("--out-dir", gen_dir, "output directory")->required();
  gen_cmd->add_option("--games", gen_games, "number of games");
  gen_cmd->add_option("--seed", gen_seed, "generator seed");
  gen_cmd->add_option("--size", board_size, "board size");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_cmd->parsed()) {
      std::filesystem::create_directories(gen_dir);
      for (int i = 0; i < gen_games; ++i) {
        SgfGame game = generate_synthetic_game(gen_seed + i, board_size);
        char name[32];
        std::snprintf(name, sizeof name, "game_%05d.sgf", i);
        std::ofstream f(gen_dir + "/" + name);
        f << serialize_sgf(game);
      }
      std::cout << "wrote " << gen_games << " games to " << gen_dir << "\n";
      return 0;
    }

    Arch arch = arch_from_string(arch_name);
    FilterCriteria crit;
    crit.require_size = board_size;
    Corpus corpus = load_corpus(corpus_dir, crit);
    if (!manifest_path.empty()) {
      std::ofstream f(manifest_path);
      f << manifest_text(corpus.manifest);
    }
    std::cerr << "corpus: " << corpus.games.size() << " accepted games\n";

    std::vector<TrainingPair> dataset;
    for (const SgfGame& game : corpus.games) {
      ReplayResult replay = to_training_pairs(game);
      if (replay.truncated)
        std::cerr << "warning: truncated replay in corpus\n";
      for (auto& pair : replay.pairs) dataset.push_back(std::move(pair));
    }
    std::cerr << "dataset: " << dataset.size() << " pairs\n";

    TrainConfig cfg = train_preset(arch);
    cfg.seed = seed;
    cfg.augment = augment;
    if (epochs_override > 0) cfg.epochs = epochs_override;
    if (lr_override > 0) cfg.lr_initial = lr_override;

    PolicyNet net = build_architecture(arch, board_size);
    glorot_init(net, seed);
    TrainReport report = train(net, dataset, cfg);
    std::cout << report.to_lines();
    save_weights(net, out_path);
    std::cerr << "saved " << out_path << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
