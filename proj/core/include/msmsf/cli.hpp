#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace msmsf {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

/// Entry point of the `msmsf` tool: train | predict | eval | inspect | synth.
/// Errors are reported on `err` and mapped to the exit-code contract.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace msmsf
