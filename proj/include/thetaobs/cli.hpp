#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace thetaobs::cli {

// Exit codes: 0 all pass, 1 check failure, 2 usage error, 3 capacity.
int run(const std::vector<std::string> &args, std::ostream &out,
        std::ostream &err);

} // namespace thetaobs::cli
