#pragma once

#include <string>

namespace volterra {

// Shortest decimal string that parses back to the same double. Used for every
// CSV cell so that identical runs produce identical bytes.
std::string format_double(double x);

}  // namespace volterra
