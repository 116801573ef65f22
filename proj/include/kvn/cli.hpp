#ifndef KVN_CLI_HPP
#define KVN_CLI_HPP

#include "kvn/json_io.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace kvn::cli {

// exit codes: 0 success, 1 I/O or schema error, 2 mathematical refusal
// (NotExtendable / NotRepresentable; the report carries the witness).
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitRefused = 2;

struct Outcome {
  int exit_code{kExitOk};
  io::json report;
};

/// Run one subcommand on a parsed problem file (envelope with kind/payload).
/// subcommand: extend-op | check-op | diag | extend-fn | gns | scenario.
Outcome execute(const std::string& subcommand, const io::json& problem_file,
                std::uint64_t default_seed);

/// Run every fixture listed in <dir>/corpus.json, print one line per fixture
/// and a final summary; returns kExitOk only if all pass.
int run_corpus(const std::string& dir, std::ostream& os);

/// Full argv entry point.
int main_entry(int argc, char** argv);

}  // namespace kvn::cli

#endif  // KVN_CLI_HPP
