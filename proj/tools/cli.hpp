#ifndef EGGPRD_TOOLS_CLI_HPP
#define EGGPRD_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace eggprd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line. argv[0] is the program name.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace eggprd::cli

#endif
