#pragma once

// The `bhc` command line: verify, mobius-audit, solve, sweep.
//
// Exit codes: 0 success, 1 residual above tolerance (or an audit that failed
// its cross-checks), 2 usage error, 3 solver failure.

#include <iosfwd>
#include <string>
#include <vector>

namespace bhc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitResidual = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSolver = 3;

/// Runs one command; `args` excludes the program name.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

/// Parses `key=value` config text (blank lines and '#' comments ignored)
/// into `--key=value` arguments. Throws std::invalid_argument on bad lines.
std::vector<std::string> config_arguments(const std::string& text);

/// Canonical text of a config: one `key=value` per line, sorted by key,
/// later duplicates overriding earlier ones.
std::string canonical_config(const std::string& text);

}  // namespace bhc::cli
