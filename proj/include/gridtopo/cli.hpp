#pragma once

#include <string>
#include <vector>

namespace gridtopo {

// Full command-line front end; returns the process exit code
// (0 ok, 2 usage, 3 data/schema, 4 numerical failure).
int run_cli(int argc, char** argv);
int run_cli(const std::vector<std::string>& args);  // args without program name

}  // namespace gridtopo
