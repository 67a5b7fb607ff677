// gcgail: generate a synthetic panel, train imitation models, evaluate them
// and compare runs.

#include <CLI11.hpp>

#include <iostream>

#include "gcgail/app.hpp"

namespace {

struct Common {
  std::optional<std::string> config;
  std::optional<std::string> out;
  std::uint64_t seed = 0;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c, bool with_seed) {
  cmd->add_option("--config", c.config, "key = value configuration file");
  cmd->add_option("--out", c.out, "output directory");
  if (with_seed) cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_flag("--quiet", c.quiet, "suppress progress messages");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace gcgail;
  CLI::App cli{"Group-conditioned imitation learning of departure-time choices"};
  cli.require_subcommand(1);

  Common gen_c, train_c, eval_c, cmp_c;
  std::string data = "data";
  std::string model = "gcgail";
  std::string scenario = "full";
  std::string checkpoint;
  std::optional<std::string> eval_model;
  bool run_missing = false;

  auto* gen = cli.add_subcommand("gen", "synthesize trips, trajectories and profiles");
  add_common(gen, gen_c, true);

  auto* train = cli.add_subcommand("train", "train one model on one scenario");
  add_common(train, train_c, true);
  train->add_option("--data", data, "data directory written by gen");
  train->add_option("--model", model, "bc, gail, cgail or gcgail");
  train->add_option("--scenario", scenario,
                    "full, half_stations, p10..p90, wf3, wc2, wd2 or ges");

  auto* ev = cli.add_subcommand("eval", "evaluate a checkpoint on the test split");
  add_common(ev, eval_c, false);
  ev->add_option("--checkpoint", checkpoint, "checkpoint.json written by train")->required();
  ev->add_option("--data", data, "data directory written by gen");
  ev->add_option("--model", eval_model, "expected model; its conditioning must match");

  auto* cmp = cli.add_subcommand("compare", "summarize a (model, scenario, seed) matrix");
  add_common(cmp, cmp_c, false);
  cmp->add_flag("--run-missing", run_missing, "generate, train and evaluate missing cells");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = cli.exit(e);
    return rc == 0 ? 0 : app::kInputError;
  }

  try {
    if (*gen) {
      app::GenOptions o{gen_c.config, gen_c.out.value_or("data"), gen_c.seed, gen_c.quiet};
      const auto r = app::cmd_gen(o);
      if (!gen_c.quiet) std::cout << "content_hash " << r.content_hash << '\n';
    } else if (*train) {
      app::TrainOptions o{train_c.config, data,        train_c.out.value_or("runs"),
                          model,          scenario,    train_c.seed,
                          train_c.quiet};
      const auto dir = app::cmd_train(o);
      if (!train_c.quiet) std::cout << (dir / "checkpoint.json").string() << '\n';
    } else if (*ev) {
      app::EvalOptions o{checkpoint, data, eval_c.out, eval_model, eval_c.quiet};
      const auto dir = app::cmd_eval(o);
      if (!eval_c.quiet) std::cout << dir.string() << '\n';
    } else if (*cmp) {
      app::CompareOptions o{cmp_c.config, cmp_c.out.value_or("runs"), run_missing, cmp_c.quiet};
      const auto r = app::cmd_compare(o);
      for (const auto& line : r.ordering_lines) std::cout << line << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "gcgail: " << e.what() << '\n';
    return app::exit_code(e);
  }
  return app::kOk;
}
