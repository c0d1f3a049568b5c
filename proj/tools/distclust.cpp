#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "distclust/acceptance.hpp"
#include "distclust/errors.hpp"
#include "distclust/harness.hpp"

namespace {

// "11:20" is an inclusive integer range, "1,2.5,4" a list.
std::vector<double> parse_c_values(const std::string& text) {
  std::vector<double> out;
  if (const auto colon = text.find(':'); colon != std::string::npos) {
    const int lo = std::stoi(text.substr(0, colon));
    const int hi = std::stoi(text.substr(colon + 1));
    if (hi < lo) throw CLI::ValidationError("--c", "empty range " + text);
    for (int c = lo; c <= hi; ++c) out.push_back(c);
    return out;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    out.push_back(std::stod(text.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void add_experiment_options(CLI::App* cmd, distclust::ExperimentConfig& cfg, std::string& dataset,
                            std::string& out, std::string& format) {
  cmd->add_option("--model", cfg.model, "blackboard | coordinator | centralized")
      ->check(CLI::IsMember({"blackboard", "coordinator", "centralized"}));
  cmd->add_option("--algo", cfg.algo, "mp | as | eas | as-jl | eas-jl | coreset")
      ->check(CLI::IsMember({"mp", "as", "eas", "as-jl", "eas-jl", "coreset"}));
  cmd->add_option("--dataset", dataset, "CSV path or synthetic:k=..,per=..,d=..,range=..,delta=..,seed=..")
      ->required();
  cmd->add_option("--k", cfg.k)->check(CLI::PositiveNumber);
  cmd->add_option("--z", cfg.z)->check(CLI::Range(1.0, 16.0));
  cmd->add_option("--eps", cfg.eps)->check(CLI::Range(1e-6, 0.999999));
  cmd->add_option("--sites", cfg.s)->check(CLI::PositiveNumber);
  cmd->add_option("--seed", cfg.seed)->envname("DISTCLUST_SEED");
  cmd->add_option("--d-prime", cfg.d_prime, "projected dimension for the JL baselines; 0 means d/4");
  cmd->add_option("--q", cfg.q, "rounding base for EAS")->check(CLI::Range(1.000001, 1e9));
  cmd->add_option("--delta", cfg.delta, "grid side; 0 infers it");
  cmd->add_option("--c-m", cfg.c_m, "coreset size coefficient")->check(CLI::PositiveNumber);
  cmd->add_option("--out", out, "output path, - for stdout");
  cmd->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed clustering simulator"};
  app.require_subcommand(1);

  distclust::ExperimentConfig cfg;
  std::string dataset, out = "-", format = "csv", c_values = "1";
  auto* run = app.add_subcommand("run", "one experiment, one result row");
  add_experiment_options(run, cfg, dataset, out, format);
  run->add_option("--c", cfg.c, "baseline budget coefficient");

  auto* sweep = app.add_subcommand("sweep", "one row per value of c");
  add_experiment_options(sweep, cfg, dataset, out, format);
  sweep->add_option("--c", c_values, "range lo:hi or comma list");

  distclust::AcceptanceOptions verify_opts;
  verify_opts.data_dir = DISTCLUST_DATA_DIR;
  auto* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--seed", verify_opts.seed)->envname("DISTCLUST_SEED");
  verify->add_option("--only", verify_opts.only, "criterion ids to run");
  verify->add_option("--data-dir", verify_opts.data_dir, "directory holding digits.csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      bool all = true;
      distclust::run_acceptance(verify_opts, [&](const distclust::CriterionResult& r) {
        all &= r.pass;
        std::cout << distclust::format_criterion(r) << std::endl;
      });
      return all ? 0 : 1;
    }
    const distclust::Dataset points = distclust::load_dataset(dataset, cfg.seed);
    std::vector<distclust::ResultRow> rows;
    if (*run) {
      rows.push_back(distclust::run_experiment(points, cfg));
    } else {
      rows = distclust::run_sweep(points, cfg, parse_c_values(c_values));
    }
    distclust::emit_results(rows, out, format);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "distclust: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
