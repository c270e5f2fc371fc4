#pragma once

// Command-line front end: simulate, indexes, compare, traffic.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace urbanaq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitData = 2;

int simulate(const std::filesystem::path& scenario, const std::filesystem::path& out_dir,
             std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err);

int indexes(const std::filesystem::path& data_dir, const std::filesystem::path& out_dir,
            std::ostream& out, std::ostream& err);

enum class CompareMode { Paths, MobileFixed };

int compare(const std::filesystem::path& data_dir, CompareMode mode,
            const std::filesystem::path& out_dir, double radius_m, std::ostream& out,
            std::ostream& err);

int traffic(const std::filesystem::path& access_config, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to one subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace urbanaq::cli
