#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "tengen/arena.hpp"

using namespace tengen;

namespace {

// Engine spec strings: either a shell command for an external GTP engine,
// or "builtin:<mode>[,key=value...]" for an in-process one.
//   modes: search | greedy | random
//   keys:  rollouts, batch, bandit (ucb1|thompson), prior-k, seed,
//          ppn=<weights>, rpn=<weights>
EngineSpec parse_engine_spec(const std::string& text) {
  EngineSpec spec;
  spec.name = text;
  if (text.rfind("builtin:", 0) != 0) {
    spec.command = text;
    return spec;
  }
  std::istringstream in(text.substr(8));
  std::string field;
  bool first = true;
  while (std::getline(in, field, ',')) {
    if (first) {
      first = false;
      if (field == "random")
        spec.inproc.random_mover = true;
      else if (field == "greedy")
        spec.inproc.greedy = true;
      else if (field != "search")
        throw CLI::ValidationError("unknown builtin engine mode: " + field);
      continue;
    }
    auto eq = field.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("expected key=value in engine spec: " + field);
    std::string key = field.substr(0, eq), value = field.substr(eq + 1);
    if (key == "rollouts")
      spec.inproc.search.total_rollouts = std::stoi(value);
    else if (key == "batch")
      spec.inproc.search.batch_size = std::stoi(value);
    else if (key == "bandit")
      spec.inproc.search.bandit =
          value == "ucb1" ? BanditKind::UCB1 : BanditKind::Thompson;
    else if (key == "prior-k")
      spec.inproc.search.prior_strength = std::stod(value);
    else if (key == "seed")
      spec.inproc.search.seed = std::stoull(value);
    else if (key == "ppn")
      spec.inproc.ppn = std::make_shared<PolicyNet>(load_weights(value));
    else if (key == "rpn") {
      spec.inproc.rpn = std::make_shared<PolicyNet>(load_weights(value));
      spec.inproc.search.rollout_policy = RolloutKind::Network;
    } else
      throw CLI::ValidationError("unknown engine spec key: " + key);
  }
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tengen engine-vs-engine arena"};

  std::string engine_a, engine_b;
  MatchConfig cfg;
  app.add_option("--engine-a", engine_a, "engine A spec")->required();
  app.add_option("--engine-b", engine_b, "engine B spec")->required();
  app.add_option("--games", cfg.games, "number of games")->default_val(200);
  app.add_option("--komi", cfg.komi, "komi")->default_val(7.5);
  app.add_option("--size", cfg.size, "board size")->default_val(19);
  app.add_option("--seed", cfg.seed, "match seed");
  app.add_option("--out-dir", cfg.out_dir, "SGF and report output directory");
  app.add_option("--move-timeout", cfg.move_timeout_seconds,
                 "per-move timeout in seconds");
  app.add_flag("!--no-alternate", cfg.alternate_colors,
               "keep engine A on Black every game");
  CLI11_PARSE(app, argc, argv);

  try {
    cfg.engine_a = parse_engine_spec(engine_a);
    cfg.engine_b = parse_engine_spec(engine_b);
    MatchReport report = run_match(cfg);
    std::cout << report.to_table(cfg);
    std::cout << report.to_machine_lines();
    if (!cfg.out_dir.empty()) {
      std::ofstream f(cfg.out_dir + "/report.txt");
      f << report.to_table(cfg) << report.to_machine_lines();
    }
  } catch (const std::exception& e) {
    std::cerr << "arena failed: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
