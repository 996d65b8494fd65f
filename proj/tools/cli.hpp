#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace specforge::cli {

// Exit codes: 0 success, 1 domain error, 2 usage error.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace specforge::cli
