#include "problem_file.hpp"

#include <fstream>
#include <sstream>

#include "drsplit/error.hpp"
#include "drsplit/io.hpp"
#include "json.hpp"

namespace drsplit::cli {

using json = nlohmann::json;

namespace {

Shape parse_shape(const json& j) {
  const auto dims = j.get<std::vector<long>>();
  if (dims.size() == 1 && dims[0] >= 1) return {ShapeKind::vector, dims[0]};
  if (dims.size() == 2 && dims[0] == dims[1] && dims[0] >= 1)
    return {ShapeKind::symmetric_matrix, dims[0]};
  throw DomainError("problem: shape must be [n] or [p, p]");
}

Eigen::MatrixXd parse_matrix(const json& j, Eigen::Index n) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (static_cast<Eigen::Index>(rows.size()) != n)
    throw ShapeError("problem: affine matrix needs " + std::to_string(n) + " rows");
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(r.size()) != n)
      throw ShapeError("problem: affine matrix row " + std::to_string(i + 1) + " has " +
                       std::to_string(r.size()) + " entries");
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = r[static_cast<std::size_t>(k)];
  }
  return m;
}

OperatorSpec parse_operator(const json& j, const Shape& shape, std::size_t index) {
  const std::string where = "problem: operator " + std::to_string(index + 1);
  if (!j.is_object() || !j.contains("kind")) throw DomainError(where + " needs a \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "affine") {
    if (shape.kind != ShapeKind::vector) throw ShapeError(where + ": affine needs vector points");
    const Eigen::MatrixXd m = parse_matrix(j.at("matrix"), shape.dim);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(shape.dim);
    if (j.contains("offset")) {
      const auto v = j.at("offset").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(v.size()) != shape.dim)
        throw ShapeError(where + ": offset has " + std::to_string(v.size()) + " entries");
      b = Eigen::Map<const Eigen::VectorXd>(v.data(), shape.dim);
    }
    std::optional<double> sigma;
    if (j.contains("sigma")) sigma = j.at("sigma").get<double>();
    return OperatorSpec::affine(m, b, sigma);
  }
  if (kind == "zero") {
    if (shape.kind != ShapeKind::vector) throw ShapeError(where + ": zero needs vector points");
    return OperatorSpec::zero(shape.dim);
  }
  if (kind == "psd_indicator") return OperatorSpec::psd_indicator();
  if (kind == "quadratic_tracking")
    return OperatorSpec::quadratic_tracking(point_from_json(j.at("target").dump()));
  if (kind == "phi_elementwise")
    return OperatorSpec::phi_elementwise(j.at("tau").get<double>(), j.at("omega").get<double>());
  if (kind == "phi_spectral")
    return OperatorSpec::phi_spectral(j.at("tau").get<double>(), j.at("omega").get<double>());
  throw DomainError(where + ": unknown kind '" + kind + "'");
}

}  // namespace

Variant parse_variant(const std::string& s) {
  if (s == "FG" || s == "fg") return Variant::FG;
  if (s == "GF" || s == "gf") return Variant::GF;
  throw DomainError("variant must be FG or GF, got '" + s + "'");
}

const char* variant_name(Variant v) { return v == Variant::FG ? "FG" : "GF"; }

ProblemFile parse_problem(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("problem: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DomainError("problem: expected a JSON object");
  for (const auto& [key, _] : j.items())
    if (key != "shape" && key != "operators" && key != "weights" && key != "variant" &&
        key != "x0")
      throw DomainError("problem: unknown field '" + key + "'");
  try {
    const Shape shape = parse_shape(j.at("shape"));
    std::vector<OperatorSpec> ops;
    const auto& list = j.at("operators");
    if (!list.is_array()) throw DomainError("problem: operators must be a list");
    for (std::size_t i = 0; i < list.size(); ++i) ops.push_back(parse_operator(list[i], shape, i));
    ProblemFile out{InclusionProblem(std::move(ops), shape), std::nullopt, std::nullopt,
                    std::nullopt};
    if (j.contains("weights")) out.weights = Weights(j.at("weights").get<std::vector<double>>());
    if (j.contains("variant")) out.variant = parse_variant(j.at("variant").get<std::string>());
    if (j.contains("x0")) {
      out.x0 = point_from_json(j.at("x0").dump());
      if (!(out.x0->shape() == shape)) throw ShapeError("problem: x0 does not match the shape");
    }
    return out;
  } catch (const json::exception& e) {
    throw DomainError(std::string("problem: ") + e.what());
  }
}

ProblemFile load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read problem file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

}  // namespace drsplit::cli
