#pragma once

#include <string>
#include <vector>

namespace mixsel {

/// Entry point behind the mixsel binary; args excludes the program name.
/// Returns the process exit code.
int run_cli(std::vector<std::string> args);

}  // namespace mixsel
