#pragma once

#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace evplan {

inline constexpr const char* kToolVersion = "0.1.0";

/// FNV-1a 64-bit, used to fingerprint the effective configuration.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

/// UTC timestamp for output manifests. Honors SOURCE_DATE_EPOCH so
/// reproducible runs emit byte-identical trees.
inline std::string manifest_timestamp() {
    std::time_t t;
    if (const char* e = std::getenv("SOURCE_DATE_EPOCH"))
        t = static_cast<std::time_t>(std::strtoll(e, nullptr, 10));
    else
        t = std::time(nullptr);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Writes run_manifest.json into out_dir: the command, a digest of the
/// effective configuration, the seed, and the tool version. Identical
/// manifests imply identical outputs.
inline void write_manifest(const std::filesystem::path& out_dir, const std::string& command,
                           const nlohmann::json& effective_config, std::uint64_t seed) {
    nlohmann::json j{{"command", command},
                     {"config_hash", fnv1a(effective_config.dump())},
                     {"seed", seed},
                     {"tool_version", kToolVersion},
                     {"timestamp", manifest_timestamp()},
                     {"config", effective_config}};
    std::ofstream out(out_dir / "run_manifest.json", std::ios::binary);
    out << j.dump(2) << '\n';
}

}  // namespace evplan
