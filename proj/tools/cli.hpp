#ifndef PSSEQ_TOOLS_CLI_HPP
#define PSSEQ_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace psseq::cli {

// Exit codes.
constexpr int kOk = 0;
constexpr int kInternal = 1;
constexpr int kValidation = 2;
constexpr int kPrecision = 3;

// args excludes the program name. Errors are reported on `err` as one JSON
// object per line.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace psseq::cli

#endif
