#pragma once

#include <iosfwd>

namespace roadgraph {

/// Entry point of the `roadgraph` tool. Returns the process exit status;
/// failures print "error E_CODE: message" as one line on `err`.
int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace roadgraph
