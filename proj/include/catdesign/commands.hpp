#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "catdesign/config.hpp"

namespace catdesign {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNoInput = 2 };

enum class OutputFormat { json, table };

struct GlobalOptions {
  std::optional<std::filesystem::path> config_path;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  std::optional<std::filesystem::path> out_dir;  // artifacts are written only when set
  OutputFormat format = OutputFormat::json;
};

/// Where a command writes. Summaries go to `out`, per-file problems to `err`.
struct CommandIo {
  std::ostream& out;
  std::ostream& err;
};

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// Timestamp for manifests: SOURCE_DATE_EPOCH when set, else the current
/// time, formatted as UTC ISO-8601.
std::string manifest_timestamp();

struct InputDigest {
  std::string path;
  std::string sha256;
};

nlohmann::ordered_json make_manifest(std::string_view command, const AppConfig& cfg, std::uint64_t seed,
                                     const std::vector<InputDigest>& inputs, const nlohmann::ordered_json& args);

/// Expands directories (non-recursive, *.cif, sorted by name) and keeps
/// explicit files as given. Throws ConfigError for an empty directory.
std::vector<std::filesystem::path> expand_cif_inputs(const std::vector<std::filesystem::path>& paths);

struct ValidateArgs {
  std::vector<std::filesystem::path> inputs;
  std::optional<std::string> target;  // formula; else config, else <stem>.target.json
};
int cmd_validate(const GlobalOptions& opts, const ValidateArgs& args, CommandIo io);

struct TextifyArgs {
  std::vector<std::filesystem::path> inputs;  // each needs <stem>.meta.json beside it
};
int cmd_textify(const GlobalOptions& opts, const TextifyArgs& args, CommandIo io);

struct GrpoArgs {
  std::filesystem::path groups;
  std::optional<double> beta;
  std::optional<double> epsilon;
};
int cmd_grpo(const GlobalOptions& opts, const GrpoArgs& args, CommandIo io);

struct MmtgArgs {
  std::optional<double> l_mae;
  std::optional<double> l_ce;
  std::optional<double> lambda;
  std::optional<std::filesystem::path> input;  // JSONL of {l_mae, l_ce}
};
int cmd_mmtg(const GlobalOptions& opts, const MmtgArgs& args, CommandIo io);

int cmd_search(const GlobalOptions& opts, CommandIo io);

struct GeometryArgs {
  std::filesystem::path input;
  std::optional<double> cutoff;  // plain distance cutoff instead of covalent bonds
};
int cmd_geometry(const GlobalOptions& opts, const GeometryArgs& args, CommandIo io);

}  // namespace catdesign
