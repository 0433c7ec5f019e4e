#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flakiloc::cli {

// Subcommands: localize, evaluate, synth. Returns 0 on success, 1 on a usage
// error (help text goes to `err`), 2 on a data error. FLAKILOC_THREADS caps
// the number of worker threads.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flakiloc::cli
