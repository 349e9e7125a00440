#pragma once
// The nlip command line: subcommands energy, scan-split, screen, isop-sample,
// minimize, deform-check and potential.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace nlip::cli {

inline constexpr char const* artifact_version = "0.1.0";

/// Exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_runtime = 3;

/// Runs one invocation; args excludes the program name. Machine-readable
/// results go to `out` unless --out names a file; diagnostics go to `err`.
int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

struct RunManifest {
    std::string subcommand;
    std::uint64_t params_hash = 0;
    std::uint64_t seed = 0;
    std::string started_at;  // UTC, ISO 8601
    std::string artifact_version = cli::artifact_version;
};

/// JSON text of a manifest; params_hash is written as 16 hex digits.
std::string manifest_json(RunManifest const& m);

/// <output>.manifest.json
std::filesystem::path manifest_path(std::filesystem::path const& output);

} // namespace nlip::cli
