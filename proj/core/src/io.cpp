#include "drsplit/io.hpp"

#include "drsplit/error.hpp"
#include "json.hpp"

namespace drsplit {

using nlohmann::json;

std::string point_to_json(const Point& x) {
  json j;
  const auto& v = x.values();
  if (x.shape().kind == ShapeKind::vector) {
    j["shape"] = {x.shape().dim};
    std::vector<double> flat(v.data(), v.data() + v.size());
    j["values"] = flat;
  } else {
    j["shape"] = {x.shape().dim, x.shape().dim};
    json rows = json::array();
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(v.cols()));
      for (Eigen::Index c = 0; c < v.cols(); ++c) row[static_cast<std::size_t>(c)] = v(r, c);
      rows.push_back(row);
    }
    j["values"] = rows;
  }
  return j.dump();
}

Point point_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("point: invalid JSON: ") + e.what());
  }
  try {
    if (j.is_array()) {
      const auto v = j.get<std::vector<double>>();
      return Point::vector(
          Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
    const auto shape = j.at("shape").get<std::vector<long>>();
    const auto& values = j.at("values");
    if (shape.size() == 1) {
      const auto v = values.get<std::vector<double>>();
      if (static_cast<long>(v.size()) != shape[0])
        throw ShapeError("point: shape says " + std::to_string(shape[0]) + " entries, got " +
                         std::to_string(v.size()));
      return Point::vector(Eigen::Map<const Eigen::VectorXd>(v.data(), shape[0]));
    }
    if (shape.size() == 2) {
      if (shape[0] != shape[1]) throw ShapeError("point: matrices must be square");
      const auto rows = values.get<std::vector<std::vector<double>>>();
      if (static_cast<long>(rows.size()) != shape[0])
        throw ShapeError("point: row count does not match shape");
      Eigen::MatrixXd m(shape[0], shape[1]);
      for (long r = 0; r < shape[0]; ++r) {
        if (static_cast<long>(rows[static_cast<std::size_t>(r)].size()) != shape[1])
          throw ShapeError("point: row " + std::to_string(r) + " has the wrong length");
        for (long c = 0; c < shape[1]; ++c)
          m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
      }
      return Point::symmetric(m);
    }
    throw ShapeError("point: shape must have one or two entries");
  } catch (const json::exception& e) {
    throw DomainError(std::string("point: ") + e.what());
  }
}

}  // namespace drsplit
