#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ngmn {

/// Runs one CLI invocation. `args` excludes the program name.
/// Returns 0 on success, 1 on data or runtime errors, 2 on usage errors.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ngmn
