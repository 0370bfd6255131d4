// cin: batch front end for the information-network formation games.
//
//   cin <command> --spec FILE [--out FILE] [--seed N] [--threads N] [--max-n N]
//
// Commands: enumerate, regions, poa-sweep, mil-sweep, production, few-sweep,
// verify. Exit status: 0 ok, 1 verification failure, 2 invalid spec,
// 3 enumeration cap exceeded.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cin/experiment.hpp"

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kBadSpec = 2, kCapExceeded = 3 };

struct Args {
  std::string spec;
  std::string out;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  int max_n = cin::kFullScanAgents;
};

int emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return kOk;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << path << '\n';
    return kBadSpec;
  }
  out << text;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information-network formation games: equilibria, efficiency, production"};
  app.require_subcommand(1);

  Args args;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--spec", args.spec, "Experiment spec (key = value lines)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "Output file (default stdout)");
    sub->add_option("--seed", args.seed, "Random seed; overrides the spec's seed key");
    sub->add_option("--threads", args.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--max-n", args.max_n, "Enumeration cap on the number of agents")->check(CLI::Range(1, 16));
  };

  const char* commands[] = {"enumerate", "regions", "poa-sweep", "mil-sweep", "production", "few-sweep", "verify"};
  const char* help[] = {
      "Nash and strict Nash equilibria of one game",
      "Connectivity regions over a cost x redundancy grid",
      "Predicted and brute-force price of anarchy over a grid",
      "Predicted and brute-force information loss over a grid",
      "Equilibria of the production game",
      "Producer fraction and total information versus agent count",
      "Cross-check closed forms against brute force",
  };
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    subs.push_back(app.add_subcommand(commands[i], help[i]));
    add_common(subs.back());
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadSpec;
  }

  cin::RunOptions opts;
  opts.threads = args.threads;
  opts.max_n = args.max_n;
  for (auto* sub : subs) {
    if (sub->parsed() && sub->count("--seed") > 0) {
      opts.seed = args.seed;
      opts.seed_given = true;
    }
  }

  try {
    const cin::ExperimentSpec spec = cin::load_spec_file(args.spec);
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "verify") {
      const auto result = cin::run_verify(spec, opts);
      const int written = emit(result.report, args.out);
      if (written != kOk) return written;
      return result.passed ? kOk : kVerifyFailed;
    }
    std::string text;
    if (name == "enumerate") text = cin::run_enumerate(spec, opts);
    if (name == "regions") text = cin::run_regions(spec, opts);
    if (name == "poa-sweep") text = cin::run_poa_sweep(spec, opts);
    if (name == "mil-sweep") text = cin::run_mil_sweep(spec, opts);
    if (name == "production") text = cin::run_production(spec, opts);
    if (name == "few-sweep") text = cin::run_few_sweep(spec, opts);
    return emit(text, args.out);
  } catch (const cin::CapExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCapExceeded;
  } catch (const cin::SpecError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadSpec;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadSpec;
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kVerifyFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadSpec;
  }
}
