#include <chrono>
#include <cstdio>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "adiabat/adiabat.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

int report(adiabat_status status) {
  std::fprintf(stderr, "error (%s): %s\n", adiabat_status_name(status), adiabat_last_error());
  return status == ADIABAT_ERR_CONFIG || status == ADIABAT_ERR_INVALID_ARGUMENT ? kExitUsage : kExitFail;
}

int list_experiments() {
  for (size_t i = 0; i < adiabat_experiment_count(); ++i) {
    const char *name = nullptr, *description = nullptr, *header = nullptr;
    adiabat_experiment_info(i, &name, &description, &header);
    std::printf("%-20s %s\n%-20s columns: %s\n", name, description, "", header);
  }
  return kExitPass;
}

int validate(const std::string& path) {
  adiabat_config* config = nullptr;
  if (auto s = adiabat_config_load(path.c_str(), &config); s != ADIABAT_OK) return report(s);
  std::printf("%s\n", adiabat_config_resolved(config));
  adiabat_config_free(config);
  return kExitPass;
}

int run(const std::string& path, std::string out_dir, int threads) {
  adiabat_config* config = nullptr;
  if (auto s = adiabat_config_load(path.c_str(), &config); s != ADIABAT_OK) return report(s);
  if (out_dir.empty()) out_dir = adiabat_config_output(config);
  if (out_dir.empty()) out_dir = std::string("out/") + adiabat_config_experiment(config);

  const auto start = std::chrono::steady_clock::now();
  adiabat_result* result = nullptr;
  if (auto s = adiabat_run(config, threads, &result); s != ADIABAT_OK) {
    adiabat_config_free(config);
    return report(s);
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto s = adiabat_result_write(config, result, out_dir.c_str(), wall);
  const int code = s != ADIABAT_OK ? report(s) : adiabat_result_passed(result) ? kExitPass : kExitFail;
  if (s == ADIABAT_OK) {
    std::fputs(adiabat_result_summary(result), stdout);
    std::printf("outputs: %s (%.1f s)\n", out_dir.c_str(), wall);
  }
  adiabat_result_free(result);
  adiabat_config_free(config);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adiabatic-invariant experiments for the FPU chain"};
  app.set_version_flag("--version", std::string(adiabat_version()));
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run_cmd->add_option("config", config_path, "Config file")->required();
  run_cmd->add_option("--out", out_dir, "Output directory (default: config \"output\" or out/<experiment>)");
  run_cmd->add_option("--threads", threads, "Worker threads; results do not depend on it")
      ->check(CLI::Range(1, 1024));

  auto* validate_cmd = app.add_subcommand("validate", "Check a config and print it with defaults filled in");
  validate_cmd->add_option("config", config_path, "Config file")->required();

  app.add_subcommand("list-experiments", "List experiments and their CSV columns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  if (run_cmd->parsed()) return run(config_path, out_dir, threads);
  if (validate_cmd->parsed()) return validate(config_path);
  return list_experiments();
}
