// Command-line front end over the shared-library C API.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "graspmap/capi.h"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitPipeline = 3;
constexpr int kExitEval = 4;

int complain(const char* what, int code) {
  std::cerr << what << ": " << gm_last_error() << "\n";
  return code;
}

bool write_file(const std::string& path, const char* text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return bool(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contact-map refinement and grasp-pose toolkit"};
  app.require_subcommand(1);

  std::string bundle, config, out, logs, maps, shape;
  std::optional<int> intent;
  int threads = 0;
  int resolution = 128;
  std::uint64_t seed = 0;

  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", config, "pipeline config document")
        ->envname("GRASPMAP_CONFIG");
  };

  CLI::App* validate = app.add_subcommand("validate", "check a scene bundle");
  validate->add_option("--bundle", bundle, "bundle manifest path")->required();
  validate->add_option("--out", out, "write the report here");

  CLI::App* run = app.add_subcommand("run", "build contact maps and poses");
  run->add_option("--bundle", bundle, "bundle manifest path")->required();
  add_config(run);
  run->add_option("--out", out, "output directory")->required();
  run->add_option("--intent", intent, "process only this intent id");
  run->add_option("--threads", threads, "worker threads for refinement");

  CLI::App* eval = app.add_subcommand("eval", "score episode logs");
  eval->add_option("--logs", logs, "directory of .jsonl episode logs")
      ->required();
  eval->add_option("--maps", maps, "directory of contact-map documents")
      ->required();
  add_config(eval);
  eval->add_option("--out", out, "write report.json into this directory");

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic bundle");
  synth->add_option("shape", shape, "sphere | cube | torus | dumbbell")
      ->required();
  synth->add_option("--out", out, "bundle directory")->required();
  synth->add_option("--resolution", resolution, "depth map resolution");
  synth->add_option("--seed", seed, "confidence jitter seed");

  CLI::App* config_cmd = app.add_subcommand("config", "config utilities");
  CLI::App* config_init =
      config_cmd->add_subcommand("init", "emit the default config");
  config_init->add_option("--out", out, "write the config here");
  config_cmd->require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  if (*validate) {
    char* report = nullptr;
    int errors = 0, warnings = 0;
    if (gm_validate(bundle.c_str(), &report, &errors, &warnings) != GM_OK)
      return complain("validate failed", kExitValidation);
    std::cout << report;
    if (!out.empty() && !write_file(out, report)) {
      gm_string_free(report);
      std::cerr << "cannot write " << out << "\n";
      return kExitValidation;
    }
    gm_string_free(report);
    return errors > 0 ? kExitValidation : 0;
  }

  if (*run) {
    if (gm_run(bundle.c_str(), config.empty() ? nullptr : config.c_str(),
               out.c_str(), intent ? *intent : -1, threads) != GM_OK)
      return complain("run failed", kExitPipeline);
    std::cout << "wrote contact maps and poses to " << out << "\n";
    return 0;
  }

  if (*eval) {
    char* report = nullptr;
    if (gm_eval(logs.c_str(), maps.c_str(),
                config.empty() ? nullptr : config.c_str(), &report) != GM_OK)
      return complain("eval failed", kExitEval);
    std::cout << report;
    if (!out.empty()) {
      std::filesystem::create_directories(out);
      const auto path = (std::filesystem::path(out) / "report.json").string();
      if (!write_file(path, report)) {
        gm_string_free(report);
        std::cerr << "cannot write " << path << "\n";
        return kExitEval;
      }
    }
    gm_string_free(report);
    return 0;
  }

  if (*synth) {
    if (gm_synth(shape.c_str(), resolution, seed, out.c_str()) != GM_OK)
      return complain("synth failed", kExitPipeline);
    std::cout << "wrote bundle to " << out << "\n";
    return 0;
  }

  if (*config_init) {
    char* text = nullptr;
    if (gm_default_config(&text) != GM_OK)
      return complain("config init failed", kExitPipeline);
    if (out.empty()) {
      std::cout << text;
    } else if (!write_file(out, text)) {
      gm_string_free(text);
      std::cerr << "cannot write " << out << "\n";
      return kExitPipeline;
    }
    gm_string_free(text);
    return 0;
  }

  return 0;
}
