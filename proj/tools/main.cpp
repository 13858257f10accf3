#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "pipeline.hpp"

namespace {

using tnload::cli::PipelineConfig;
using tnload::cli::Settings;

struct FlagSet {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string config_path;
  bool iterative = false;
  bool exact = false;
  CLI::Option* iterative_flag = nullptr;
  CLI::Option* exact_flag = nullptr;
};

void add_value(CLI::App* app, FlagSet& fs, const std::string& key, const std::string& flag, const std::string& help) {
  fs.options[key] = app->add_option(flag, fs.values[key], help);
}

/// Config file first, then every flag that was given on the command line.
Settings collect(const FlagSet& fs) {
  Settings s;
  if (!fs.config_path.empty()) s = tnload::cli::load_config_file(fs.config_path);
  for (const auto& [key, opt] : fs.options)
    if (opt->count() > 0) s[key] = fs.values.at(key);
  if (fs.iterative_flag && fs.iterative_flag->count() > 0) s["method"] = "iterative";
  if (fs.exact_flag && fs.exact_flag->count() > 0) s["exact"] = "true";
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compile grayscale images into shallow state-preparation circuits"};
  app.set_version_flag("--version", std::string("tnload ") + TNLOAD_VERSION);
  app.require_subcommand(1);

  std::map<std::string, FlagSet> flagsets;
  auto sub = [&](const std::string& name, const std::string& help) {
    CLI::App* s = app.add_subcommand(name, help);
    FlagSet& fs = flagsets[name];
    s->add_option("--config", fs.config_path, "key=value config file; flags override it");
    add_value(s, fs, "out", "-o,--out", "output directory");
    return std::pair<CLI::App*, FlagSet*>{s, &fs};
  };

  {
    auto [s, fs] = sub("encode", "load, downscale, encode and compress an image");
    add_value(s, *fs, "image", "-i,--image", "input PGM or CSV image");
    add_value(s, *fs, "side", "--side", "target resolution L (power of two)");
    add_value(s, *fs, "ordering", "--ordering", "straight or snake");
    add_value(s, *fs, "chi", "--chi", "bond cap");
  }
  {
    auto [s, fs] = sub("compile", "compile an image or MPS into a layered circuit");
    add_value(s, *fs, "image", "-i,--image", "input PGM or CSV image");
    add_value(s, *fs, "mps", "--mps", "MPS file from encode (instead of --image)");
    add_value(s, *fs, "side", "--side", "target resolution L");
    add_value(s, *fs, "ordering", "--ordering", "straight or snake");
    add_value(s, *fs, "chi", "--chi", "target and working bond cap");
    add_value(s, *fs, "depth", "-D,--depth", "number of layers");
    add_value(s, *fs, "sweeps", "--sweeps", "sweeps per stage");
    fs->iterative_flag = s->add_flag("--iterative", fs->iterative, "layer-by-layer construction only, no sweeps");
  }
  {
    auto [s, fs] = sub("simulate", "run a circuit, sample it and reconstruct the image");
    add_value(s, *fs, "circuit", "-c,--circuit", "circuit JSON");
    add_value(s, *fs, "shots", "--shots", "number of shots");
    add_value(s, *fs, "seed", "--seed", "sampler seed");
    fs->exact_flag = s->add_flag("--exact", fs->exact, "use exact probabilities instead of shots");
  }
  {
    auto [s, fs] = sub("reconstruct", "decode a shot histogram into an image");
    add_value(s, *fs, "histogram", "--histogram", "histogram CSV");
    add_value(s, *fs, "ordering", "--ordering", "straight or snake");
  }
  {
    auto [s, fs] = sub("analyze", "scaling sweeps and power-law fits");
    add_value(s, *fs, "panel", "--panel", "chi, depth, resolution or fit");
    add_value(s, *fs, "image", "-i,--image", "input image");
    add_value(s, *fs, "image_id", "--image-id", "label written into records");
    add_value(s, *fs, "side", "--side", "resolution for the depth panel");
    add_value(s, *fs, "ordering", "--ordering", "straight or snake");
    add_value(s, *fs, "chi", "--chi", "bond cap (depth and resolution panels)");
    add_value(s, *fs, "chis", "--chis", "comma-separated bond caps");
    add_value(s, *fs, "depths", "--depths", "comma-separated depths");
    add_value(s, *fs, "sides", "--sides", "comma-separated resolutions");
    add_value(s, *fs, "method", "--method", "iterative, gate_by_gate or grow");
    add_value(s, *fs, "sweeps", "--sweeps", "sweeps per optimization");
    add_value(s, *fs, "records", "--records", "records CSV for the fit panel");
    add_value(s, *fs, "fit_min", "--fit-min", "smallest x in the fit");
    add_value(s, *fs, "fit_max", "--fit-max", "largest x in the fit");
  }
  app.add_subcommand("selftest", "check the fitter and gate accounting");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tnload::cli::kExitUsage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  return tnload::cli::guarded(
      [&] {
        if (name == "selftest") return tnload::cli::cmd_selftest(std::cout) ? 0 : int{tnload::cli::kExitNumeric};
        PipelineConfig cfg;
        if (name == "analyze") cfg.method = "iterative";
        tnload::cli::apply_settings(cfg, collect(flagsets.at(name)));
        if (name == "encode") tnload::cli::cmd_encode(cfg, std::cout);
        else if (name == "compile") tnload::cli::cmd_compile(cfg, std::cout);
        else if (name == "simulate") tnload::cli::cmd_simulate(cfg, std::cout);
        else if (name == "reconstruct") tnload::cli::cmd_reconstruct(cfg, std::cout);
        else tnload::cli::cmd_analyze(cfg, std::cout);
        return 0;
      },
      std::cerr);
}
