#pragma once

#include <string>
#include <vector>

namespace wfsel::cli {

// Entry point behind the wfsel binary.  Returns the process exit code:
// 0 when every item succeeded, 1 when any per-item error was recorded,
// 2 for usage errors.
int run(const std::vector<std::string>& args);

}  // namespace wfsel::cli
