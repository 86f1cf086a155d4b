#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nvpair::cli {

inline constexpr const char* kVersion = "0.1.0";

std::uint64_t fnv1a64(std::string_view bytes);

// Runs one subcommand. Returns 0 on success, 2 on configuration or usage
// errors and 1 on model or runtime errors. Diagnostics go to stderr.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace nvpair::cli
