// specreg: run spectral-regularization experiments from a config file.
//
//   specreg filters  --config configs/filters.cfg
//   specreg deconv1d --config configs/deconv1d_f1.cfg --seed 7 --out out/f1 --trace --jobs 4
//   specreg isp2d    --config configs/isp2d.cfg
//   specreg compare  a/report.csv b/report.csv [--tolerance 1e-9]

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "specreg/errors.hpp"
#include "specreg/experiment.hpp"

namespace {

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool trace = false;
  unsigned jobs = 1;
};

void add_run_options(CLI::App* sub, RunArgs& args) {
  sub->add_option("--config", args.config, "Experiment config (key = value)")->required()->check(CLI::ExistingFile);
  sub->add_option("--seed", args.seed, "Override the config seed");
  sub->add_option("--out", args.out, "Override the output directory");
  sub->add_flag("--trace", args.trace, "Write alpha-selection traces as CSV");
  sub->add_option("--jobs", args.jobs, "Parallel (tau, rule) runs")->check(CLI::PositiveNumber);
}

int run_subcommand(specreg::ExperimentKind expected, const RunArgs& args) {
  specreg::ExperimentConfig cfg = specreg::load_config(args.config);
  if (cfg.kind != expected) {
    throw specreg::ConfigError("experiment", "config is '" + specreg::to_string(cfg.kind) +
                                                 "' but subcommand is '" + specreg::to_string(expected) + "'");
  }
  if (args.seed) cfg.seed = *args.seed;
  if (args.out) cfg.out_dir = *args.out;

  specreg::RunOptions options;
  options.out_dir = cfg.out_dir;
  options.trace = args.trace;
  options.jobs = args.jobs;
  const specreg::ExperimentReport report = specreg::run_experiment(cfg, options);

  if (!report.rows.empty()) {
    std::cout << "tau,rule,alpha,relative_error\n";
    for (const auto& row : report.rows) {
      std::cout << specreg::format_number(row.tau) << ',' << row.rule << ',' << specreg::format_number(row.alpha)
                << ',' << specreg::format_number(row.relative_error) << '\n';
    }
  }
  std::cerr << "wrote " << options.out_dir.string() << " (config " << report.provenance.config_hash << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral regularization experiments (interpolating Tikhonov / cutoff filters)"};
  app.require_subcommand(1);

  RunArgs filters_args;
  RunArgs deconv_args;
  RunArgs isp_args;
  add_run_options(app.add_subcommand("filters", "Dump filter curves q(sigma) as CSV"), filters_args);
  add_run_options(app.add_subcommand("deconv1d", "1D periodic deconvolution experiment"), deconv_args);
  add_run_options(app.add_subcommand("isp2d", "2D multi-frequency inverse source experiment"), isp_args);

  std::string report_a;
  std::string report_b;
  std::optional<double> tolerance;
  CLI::App* compare = app.add_subcommand("compare", "Compare two report CSVs row by row");
  compare->add_option("a", report_a, "First report CSV")->required()->check(CLI::ExistingFile);
  compare->add_option("b", report_b, "Second report CSV")->required()->check(CLI::ExistingFile);
  compare->add_option("--tolerance", tolerance, "Fail (exit 1) if the max relative delta exceeds this");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("filters")) return run_subcommand(specreg::ExperimentKind::Filters, filters_args);
    if (app.got_subcommand("deconv1d")) return run_subcommand(specreg::ExperimentKind::Deconv1d, deconv_args);
    if (app.got_subcommand("isp2d")) return run_subcommand(specreg::ExperimentKind::Isp2d, isp_args);
    if (app.got_subcommand("compare")) {
      const auto diff = specreg::compare_reports(specreg::read_report_csv(report_a), specreg::read_report_csv(report_b));
      specreg::print_diff(diff, std::cout);
      if (tolerance && diff.max_rel > *tolerance) return 1;
      return 0;
    }
  } catch (const specreg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
