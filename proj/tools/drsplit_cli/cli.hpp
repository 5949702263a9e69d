#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace drsplit::cli {

// exit codes
constexpr int kOk = 0;
constexpr int kUsage = 1;        // malformed flags, unreadable or invalid input
constexpr int kUnsupported = 2;  // planner cannot certify a step
constexpr int kMaxIter = 3;      // solve stopped at --max-iter
constexpr int kAllFailed = 4;    // experiment: every run failed
constexpr int kVerifyFailed = 5;  // verify: at least one check failed

// args excludes the program name
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace drsplit::cli
