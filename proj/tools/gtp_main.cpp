#include <CLI11.hpp>

#include <iostream>
#include <memory>
#include <string>

#include "tengen/gtp.hpp"
#include "tengen/policy_net.hpp"

using namespace tengen;

int main(int argc, char** argv) {
  CLI::App app{"tengen GTP engine"};

  std::string ppn_path, rpn_path, bandit = "thompson";
  EngineOptions opts;
  app.add_option("--ppn", ppn_path, "prior policy network weight file");
  app.add_option("--rpn", rpn_path, "rollout policy network weight file");
  app.add_option("--rollouts", opts.search.total_rollouts,
                 "rollouts per move")
      ->default_val(5120);
  app.add_option("--batch", opts.search.batch_size, "batch size B")
      ->default_val(64);
  app.add_option("--bandit", bandit, "ucb1 or thompson")
      ->check(CLI::IsMember({"ucb1", "thompson"}));
  app.add_option("--prior-k", opts.search.prior_strength,
                 "prior pseudo-count K");
  app.add_option("--komi", opts.search.komi, "komi")->default_val(7.5);
  app.add_option("--seed", opts.search.seed, "random seed");
  app.add_option("--resign-threshold", opts.resign_threshold,
                 "resign below this win-rate estimate");
  app.add_flag("--greedy", opts.greedy,
               "play the prior network argmax, no search");
  app.add_flag("--random", opts.random_mover,
               "play uniformly random legal moves (baseline)");
  CLI11_PARSE(app, argc, argv);

  opts.search.bandit =
      bandit == "ucb1" ? BanditKind::UCB1 : BanditKind::Thompson;
  try {
    if (!ppn_path.empty())
      opts.ppn = std::make_shared<PolicyNet>(load_weights(ppn_path));
    if (!rpn_path.empty()) {
      opts.rpn = std::make_shared<PolicyNet>(load_weights(rpn_path));
      opts.search.rollout_policy = RolloutKind::Network;
    }
  } catch (const std::exception& e) {
    std::cerr << "failed to load weights: " << e.what() << "\n";
    return 1;
  }
  if (opts.greedy && !opts.ppn) {
    std::cerr << "--greedy requires --ppn\n";
    return 1;
  }

  EngineSession session(std::move(opts));
  std::string line;
  while (std::getline(std::cin, line)) {
    std::cout << session.handle_line(line) << std::flush;
    if (session.quit_requested()) break;
  }
  return 0;
}
