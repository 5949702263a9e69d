#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "drsplit/engine.hpp"
#include "drsplit/reformulation.hpp"

namespace drsplit::cli {

// a problem read from JSON; gradient and prox-defined kinds need code and are not accepted
struct ProblemFile {
  InclusionProblem problem;
  std::optional<Weights> weights;
  std::optional<Variant> variant;
  std::optional<Point> x0;  // broadcast to every block
};

ProblemFile parse_problem(const std::string& json_text);
// throws DomainError naming the path when the file cannot be read
ProblemFile load_problem(const std::filesystem::path& path);

Variant parse_variant(const std::string& s);
const char* variant_name(Variant v);

}  // namespace drsplit::cli
