#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace helion {

// Runs one command line; args[0] is the program name. Returns 0 on success
// or a clean check, 1 when check finds violations, 2 on usage or input errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Parses `1..10`, `1,2,4` or `3`.
std::vector<int> parse_order_list(const std::string& text);

}  // namespace helion
