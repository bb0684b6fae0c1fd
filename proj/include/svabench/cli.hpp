// SPDX-License-Identifier: Apache-2.0
//
// `svabench` command line: check, eval, bench validate, report.
//
// Exit codes:
//   0   success (check: every assertion Pass; bench validate: no violations)
//   1   check: some assertion is Cex and none is Error;
//       bench validate: violations; report: comparison keys differ
//   2   check: some assertion is Error, or the design is unusable
//   64  usage or configuration error, missing input
//   74  I/O error while writing results
#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "svabench/config.hpp"

namespace svabench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitError = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitIo = 74;

/// `args` excludes the program name. All output goes to `out` / `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvLookup& env = process_environment());

}  // namespace svabench
