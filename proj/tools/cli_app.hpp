#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ssb::cli {

// Exit codes: 0 ok, 1 configuration/usage, 2 numerical failure, 3 verification failure.
int run_cli(int argc, char** argv);
// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Column names of law_table.csv, in order.
const std::vector<std::string>& law_table_columns();

}  // namespace ssb::cli
