#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "skelpot/bench.hpp"

namespace {

void emit(const std::string& out_dir, const std::string& name,
          const std::function<void(std::ostream&)>& write) {
  write(std::cout);
  if (out_dir.empty()) return;
  std::filesystem::create_directories(out_dir);
  std::ofstream file(std::filesystem::path(out_dir) / name);
  if (!file) throw skelpot::Error("cannot write " + name + " in '" + out_dir + "'");
  write(file);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skeleton potentials: layer potentials, Calderon operators and skeleton solves"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<CLI::App*> commands;
  for (const char* name : {"verify", "sweep", "solve", "truncation"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "flat key = value configuration")->required();
    sub->add_option("--out", out_dir, "output directory for CSV and VTK files");
    sub->add_option("--seed", seed, "overrides the configured seed");
    sub->add_option("--threads", threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
    commands.push_back(sub);
  }
  CLI11_PARSE(app, argc, argv);

  try {
    skelpot::RunConfig config = skelpot::load_config(config_path);
    for (CLI::App* sub : commands)
      if (sub->parsed() && sub->count("--seed")) skelpot::override_seed(config, seed);
    const std::string command = app.get_subcommands().front()->get_name();
    if (command == "verify") {
      const skelpot::Report report = skelpot::run_verify(config);
      emit(out_dir, "verify.csv", [&](std::ostream& o) { report.write_csv(o); });
      return report.passed() ? 0 : 1;
    }
    if (command == "sweep") {
      const skelpot::SweepResult result = skelpot::run_sweep(config, threads);
      emit(out_dir, "sweep.csv", [&](std::ostream& o) { skelpot::write_sweep_csv(o, result, config); });
      emit(out_dir, "fits.csv", [&](std::ostream& o) { skelpot::write_fits_csv(o, result, config); });
      emit(out_dir, "sweep_checks.csv", [&](std::ostream& o) { result.checks.write_csv(o); });
      return result.checks.passed() ? 0 : 1;
    }
    if (command == "solve") {
      const skelpot::Report report = skelpot::run_solve(config, out_dir);
      emit(out_dir, "solve.csv", [&](std::ostream& o) { report.write_csv(o); });
      return report.passed() ? 0 : 1;
    }
    const skelpot::Report report = skelpot::run_truncation(config);
    emit(out_dir, "truncation.csv", [&](std::ostream& o) { report.write_csv(o); });
    return report.passed() ? 0 : 1;
  } catch (const skelpot::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
