#ifndef NETGIANT_CLI_HPP
#define NETGIANT_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace netgiant::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;    // bad flags, config or parameter domain
inline constexpr int kExitNumeric = 3;  // numeric abort or graph generation failure

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace netgiant::cli

#endif  // NETGIANT_CLI_HPP
