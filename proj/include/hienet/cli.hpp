#pragma once

namespace hienet {

// Entry point of the hienet tool. Returns the process exit code:
// 0 success, 2 usage error, 1 runtime failure (structured error on stderr).
int cli_main(int argc, const char* const* argv);

}  // namespace hienet
