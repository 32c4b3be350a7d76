#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "blockforge/cli.hpp"

namespace {

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  auto outcome = blockforge::cli::run_cli(args);

  if (outcome.exit_code == 0) {
    if (!outcome.error.empty()) {
      // Help text requested; nothing else to emit.
      std::cout << outcome.error;
      return 0;
    }
    if (outcome.out_path.empty() || outcome.out_path == "-") {
      std::cout << outcome.json_text;
    } else if (!write_file(outcome.out_path, outcome.json_text)) {
      std::cerr << "error: cannot write " << outcome.out_path << "\n";
      return 4;
    }
    if (!outcome.csv_path.empty()) {
      if (!write_file(outcome.csv_path, outcome.csv_text)) {
        std::cerr << "error: cannot write " << outcome.csv_path << "\n";
        return 4;
      }
    }
    return 0;
  }

  std::cerr << outcome.error;
  if (!outcome.error.empty() && outcome.error.back() != '\n') std::cerr << "\n";
  return outcome.exit_code;
}
