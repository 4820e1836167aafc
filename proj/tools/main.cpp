#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "acoustolab/errors.hpp"
#include "acoustolab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acoustolab: damped acoustic system laboratory"};
  app.require_subcommand(1);

  acoustolab::RunOptions opts;
  std::string expect;

  const char* commands[] = {"simulate", "resolvent-sweep", "quasimode",
                            "rays",     "gcc",             "husimi",
                            "dump-matrix"};
  const char* blurbs[] = {
      "evolve a random initial state and record the energy budget",
      "sup of the resolvent norm along the imaginary axis",
      "near-resonant quasimode at given frequencies",
      "trace one generalized bicharacteristic",
      "sample-based geometric control check",
      "phase-space (Husimi) diagnostics of quasimodes",
      "write the assembled operator and dof table"};
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    CLI::App* sub = app.add_subcommand(commands[i], blurbs[i]);
    sub->add_option("-c,--config", opts.config_path, "JSON config file")
        ->required();
    sub->add_option("-o,--out", opts.out_dir, "output directory");
    sub->add_option("-w,--workers", opts.workers,
                    "worker threads (0 = ACOUSTOLAB_WORKERS or cores)");
    sub->add_option("--expect", expect,
                    "assert the verdict (sweep: bounded|unbounded, "
                    "gcc: satisfied|violated|inconclusive); mismatch exits 1");
  }

  CLI11_PARSE(app, argc, argv);
  if (!expect.empty()) opts.expect = expect;

  try {
    return acoustolab::run_command(app.get_subcommands().front()->get_name(),
                                   opts);
  } catch (const acoustolab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
