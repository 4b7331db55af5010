#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace graspmetric::cli {

// Exit codes: 0 ok, 1 compute error, 2 input error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace graspmetric::cli
