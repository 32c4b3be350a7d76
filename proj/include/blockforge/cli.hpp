#pragma once

#include <string>
#include <vector>

namespace blockforge::cli {

// Outcome of one command dispatch. The JSON payload is built entirely
// in-process so tests can compare runs byte for byte without spawning
// processes or touching the filesystem.
struct RunOutcome {
  int exit_code = 0;      // 0 ok, 2 invalid input, 3 budget, 4 internal
  std::string json_text;  // primary payload, newline-terminated
  std::string csv_text;   // optional summary table (RFC 4180, CRLF)
  std::string error;      // message for nonzero exits, or help text
  std::string out_path;   // destination for json_text ("" or "-" = stdout)
  std::string csv_path;   // destination for csv_text
};

// Parse and execute one command line (without the program name).
RunOutcome run_cli(const std::vector<std::string>& args);

}  // namespace blockforge::cli
