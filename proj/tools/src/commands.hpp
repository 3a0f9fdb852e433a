#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace docasref::cli {

/// Exit codes: 0 success, 1 backend/metric/verification failure, 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace docasref::cli
