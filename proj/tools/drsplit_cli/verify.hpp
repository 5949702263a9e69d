#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace drsplit::cli {

struct Check {
  std::string suite;
  std::string name;
  int passed = 0;
  int total = 0;
  std::string detail;  // first failure, if any
  bool ok() const { return passed == total; }
};

const std::vector<std::string>& suite_names();  // excludes "all"
bool is_suite(const std::string& name);
// runs one suite, or every suite for "all"; throws DomainError on unknown names
std::vector<Check> run_suite(const std::string& name, std::uint64_t seed);

}  // namespace drsplit::cli
