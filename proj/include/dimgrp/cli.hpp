#pragma once

// The dimgrp command line, callable in-process so tests can drive it.

#include <iosfwd>
#include <string>
#include <vector>

namespace dimgrp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name. Log verbosity comes from DIMGRP_LOG
// (trace, debug, info, warn, error, off; default warn).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dimgrp::cli
