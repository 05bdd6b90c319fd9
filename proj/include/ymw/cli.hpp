#pragma once

#include <iosfwd>

namespace ymw {

// Batch front-end. Exit codes: 0 all checks pass, 1 a check failed (report
// written), 2 usage or input error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ymw
