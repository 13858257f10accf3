#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "tnload/image_codec.hpp"

namespace tnload::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitFormat = 2,
  kExitValidation = 3,
  kExitNumeric = 4,
};

/// Every knob the subcommands read. Fields not used by a command are ignored,
/// but still feed the config hash.
struct PipelineConfig {
  std::string image;
  int side = 0;  // 0 keeps the loaded resolution
  BitOrdering ordering = BitOrdering::InterleavedStraight;
  int chi = 32;
  int depth = 3;
  int sweeps = 200;
  std::uint64_t shots = 10000;
  std::uint64_t seed = 1;
  std::string out_dir = ".";

  std::string mps;        // compile: use this MPS instead of encoding `image`
  std::string circuit;    // simulate
  std::string histogram;  // reconstruct
  std::string method = "grow";
  bool exact = false;

  std::string panel = "chi";  // analyze: chi | depth | resolution | fit
  std::vector<int> chis{1, 2, 4, 8, 16, 32, 64};
  std::vector<int> depths{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<int> sides{32, 64, 128, 256};
  std::string records;  // analyze fit: records CSV
  double fit_min = 0.0;
  double fit_max = 1e300;
  std::string image_id;
};

using Settings = std::map<std::string, std::string>;

/// key=value lines; '#' starts a comment; blank lines ignored.
Settings parse_config_text(const std::string& text);
Settings load_config_file(const std::string& path);

/// Applies settings in order; unknown keys and malformed values are
/// ValidationErrors.
void apply_settings(PipelineConfig& cfg, const Settings& settings);

/// Canonical key=value form of every field, sorted by key.
Settings to_settings(const PipelineConfig& cfg);

/// FNV-1a 64 over the canonical form minus the output directory, as 16 hex
/// digits. Identical runs written to different places share a hash.
std::string config_hash(const PipelineConfig& cfg);

/// "tool=tnload <version>", "command=<name>", "config_hash=<hash>".
std::vector<std::string> provenance_lines(const PipelineConfig& cfg, const std::string& command);

/// Checks the fields a command needs before any work starts.
void validate(const PipelineConfig& cfg, const std::string& command);

void cmd_encode(const PipelineConfig& cfg, std::ostream& log);
void cmd_compile(const PipelineConfig& cfg, std::ostream& log);
void cmd_simulate(const PipelineConfig& cfg, std::ostream& log);
void cmd_reconstruct(const PipelineConfig& cfg, std::ostream& log);
void cmd_analyze(const PipelineConfig& cfg, std::ostream& log);
/// Returns false when a self-check fails.
bool cmd_selftest(std::ostream& log);

/// Runs `body`, mapping library exceptions to exit codes and messages on `err`.
int guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace tnload::cli
