#pragma once

#include <string>
#include <vector>

namespace einwarp::cli {

// exit codes
inline constexpr int kPass = 0;
inline constexpr int kFail = 1;
inline constexpr int kComputationError = 2;
inline constexpr int kConfigError = 3;

int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args[0] is the program name

}  // namespace einwarp::cli
