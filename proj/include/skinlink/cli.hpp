#pragma once

#include <iosfwd>

namespace skinlink {

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace skinlink
