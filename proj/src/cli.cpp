#include "rsint/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "rsint/errors.hpp"
#include "rsint/experiments.hpp"
#include "rsint/gaussian_paths.hpp"

namespace rsint {

namespace {

int run_path(double hurst, std::size_t intervals, double horizon, std::uint64_t seed, const std::string& method,
             const std::string& output, std::ostream& out, std::ostream& err) {
  try {
    const HurstIndex h(hurst);
    SamplePath path = method == "cholesky" ? generate_cholesky(TimeGrid::uniform(intervals, horizon), h, seed)
                                           : generate_circulant(intervals, horizon, h, seed);
    if (output.empty() || output == "-") {
      write_path_csv(out, path);
    } else {
      std::ofstream os(output, std::ios::binary);
      if (!os) throw ArgumentError("cannot open " + output + " for writing");
      write_path_csv(os, path);
    }
    return kExitOk;
  } catch (const ArgumentError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Riemann-Stieltjes sums for fractional Brownian motion: experiments and path export", "rsint"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> paths_override, seed_override;
  std::optional<int> threads;
  CLI::App* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--output-dir", output_dir, "Output directory (overrides $RSINT_OUTPUT_DIR and the config)");
  run->add_option("--paths-override", paths_override, "Replace the config's path count");
  run->add_option("--seed-override", seed_override, "Replace the config's seed");
  run->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1, 1024));

  double hurst = 0.75, horizon = 1.0;
  std::size_t intervals = 1024;
  std::uint64_t seed = 1;
  std::string method = "circulant", output;
  CLI::App* path = app.add_subcommand("path", "Write one fBm sample path as CSV (t,value)");
  path->add_option("--hurst", hurst, "Hurst index in (0,1)")->required();
  path->add_option("--intervals", intervals, "Number of uniform intervals")->check(CLI::PositiveNumber);
  path->add_option("--horizon", horizon, "Time horizon T");
  path->add_option("--seed", seed, "Seed");
  path->add_option("--method", method, "Sampler")->check(CLI::IsMember({"circulant", "cholesky"}));
  path->add_option("--output", output, "Output file, '-' for stdout");

  std::vector<std::string> argv_store{"rsint"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  if (run->parsed()) {
    RunOptions opts;
    if (output_dir) opts.output_dir = *output_dir;
    opts.paths_override = paths_override;
    opts.seed_override = seed_override;
    opts.threads = threads;
    const int code = run_config_file(config_path, opts, out, err);
    return code;
  }
  return run_path(hurst, intervals, horizon, seed, method, output, out, err);
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace rsint
