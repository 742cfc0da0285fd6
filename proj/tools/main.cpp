#include <iostream>
#include <map>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "davenport/cli.hpp"
#include "davenport/errors.hpp"
#include "davenport/json_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Davenport series analysis"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;
  davenport::cli::Overrides ov;
  std::uint64_t seed = 0;
  double R = 0.0, N = 0.0;
  std::string grid;

  const std::map<std::string, std::string> about{
      {"eval", "partial sums on a grid"},
      {"jumps", "jump and maximal operators, theta and roundtrip"},
      {"exponent", "pointwise Holder exponents"},
      {"spectrum", "empirical and predicted multifractal spectrum"},
      {"sobolev", "Sobolev classification and Fourier bound check"},
      {"selftest", "fixed scenarios for every command"}};
  for (const auto& name : davenport::cli::command_names()) {
    auto* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("--config", config_path, "scenario JSON file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads (default all)")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "seed for low-discrepancy sampling");
    sub->add_option("--R", R, "outer truncation radius");
    sub->add_option("--N", N, "partial-sum truncation");
    sub->add_option("--grid", grid, "grid counts, e.g. 256 or 256x256");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  auto* sub = app.get_subcommands().front();
  if (sub->count("--seed")) ov.seed = seed;
  if (sub->count("--R")) ov.R = R;
  if (sub->count("--N")) ov.N = N;
  if (sub->count("--grid")) ov.grid = grid;
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  nlohmann::json config = nlohmann::json::object();
  try {
    if (!config_path.empty()) config = davenport::read_json_file(config_path);
    config = davenport::cli::apply_overrides(std::move(config), ov);
  } catch (const davenport::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  try {
    return davenport::cli::run(sub->get_name(), config, out_dir, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  }
}
