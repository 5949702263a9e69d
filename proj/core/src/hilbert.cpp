#include "drsplit/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "drsplit/error.hpp"

namespace drsplit {

std::string Shape::describe() const {
  if (kind == ShapeKind::vector) return "vector(" + std::to_string(dim) + ")";
  return "symmetric(" + std::to_string(dim) + "x" + std::to_string(dim) + ")";
}

Point Point::vector(Eigen::VectorXd v) {
  const Eigen::Index n = v.size();
  return Point(Shape{ShapeKind::vector, n}, Eigen::MatrixXd(std::move(v)));
}

Point Point::vector(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double e : v) out(i++) = e;
  return vector(std::move(out));
}

Point Point::scalar(double v) { return vector(Eigen::VectorXd::Constant(1, v)); }

Point Point::symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols())
    throw ShapeError("symmetric point needs a square matrix, got " + std::to_string(m.rows()) +
                     "x" + std::to_string(m.cols()));
  Eigen::MatrixXd s = 0.5 * (m + m.transpose());
  return Point(Shape{ShapeKind::symmetric_matrix, m.rows()}, std::move(s));
}

Point Point::zeros(const Shape& shape) {
  if (shape.kind == ShapeKind::vector) return vector(Eigen::VectorXd::Zero(shape.dim));
  return Point(shape, Eigen::MatrixXd::Zero(shape.dim, shape.dim));
}

void Point::require_same_shape(const Point& other, const char* op) const {
  if (!(shape_ == other.shape_))
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_.describe() + " vs " +
                     other.shape_.describe());
}

double Point::dot(const Point& other) const {
  require_same_shape(other, "dot");
  return (data_.array() * other.data_.array()).sum();
}

double Point::mean_square() const {
  const auto n = entries();
  return n == 0 ? 0.0 : data_.squaredNorm() / static_cast<double>(n);
}

Point Point::operator-() const { return Point(shape_, -data_); }

Point& Point::operator+=(const Point& other) {
  require_same_shape(other, "add");
  data_ += other.data_;
  return *this;
}

Point& Point::operator-=(const Point& other) {
  require_same_shape(other, "subtract");
  data_ -= other.data_;
  return *this;
}

Point& Point::operator*=(double s) {
  data_ *= s;
  return *this;
}

Point Point::with_flat(const Eigen::VectorXd& flat) const {
  if (flat.size() != entries())
    throw ShapeError("with_flat: expected " + std::to_string(entries()) + " entries, got " +
                     std::to_string(flat.size()));
  if (shape_.kind == ShapeKind::vector) return vector(flat);
  return symmetric(flat.reshaped(shape_.dim, shape_.dim));
}

Weights::Weights(std::vector<double> lambdas) : lambdas_(std::move(lambdas)) {
  if (lambdas_.empty()) throw DomainError("weights: need at least one entry");
  for (std::size_t i = 0; i < lambdas_.size(); ++i) {
    if (!(lambdas_[i] > 0.0) || !std::isfinite(lambdas_[i]))
      throw DomainError("weights: entry " + std::to_string(i + 1) + " is not positive");
  }
  const double sum = std::accumulate(lambdas_.begin(), lambdas_.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-12)
    throw DomainError("weights: entries sum to " + std::to_string(sum) + ", expected 1");
}

Weights Weights::equal(std::size_t count) {
  if (count == 0) throw DomainError("weights: need at least one entry");
  return Weights(std::vector<double>(count, 1.0 / static_cast<double>(count)));
}

double Weights::min() const { return *std::min_element(lambdas_.begin(), lambdas_.end()); }
double Weights::max() const { return *std::max_element(lambdas_.begin(), lambdas_.end()); }

Stack::Stack(std::vector<Point> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw ShapeError("stack: need at least one block");
  for (std::size_t i = 1; i < blocks_.size(); ++i) {
    if (!(blocks_[i].shape() == blocks_[0].shape()))
      throw ShapeError("stack: block " + std::to_string(i + 1) + " has shape " +
                       blocks_[i].shape().describe() + ", expected " +
                       blocks_[0].shape().describe());
  }
}

const Shape& Stack::shape() const {
  if (blocks_.empty()) throw ShapeError("stack: empty stack has no shape");
  return blocks_[0].shape();
}

namespace {

void require_compatible(const Stack& a, const Stack& b, const char* op) {
  if (a.size() != b.size())
    throw ShapeError(std::string(op) + ": block counts " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
}

void require_weights(const Stack& a, const Weights& w, const char* op) {
  if (a.size() != w.size())
    throw ShapeError(std::string(op) + ": " + std::to_string(a.size()) + " blocks but " +
                     std::to_string(w.size()) + " weights");
}

}  // namespace

Stack Stack::operator-() const {
  std::vector<Point> out;
  out.reserve(size());
  for (const auto& b : blocks_) out.push_back(-b);
  return Stack(std::move(out));
}

Stack operator+(const Stack& a, const Stack& b) {
  require_compatible(a, b, "add");
  std::vector<Point> out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(a[i] + b[i]);
  return Stack(std::move(out));
}

Stack operator-(const Stack& a, const Stack& b) {
  require_compatible(a, b, "subtract");
  std::vector<Point> out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(a[i] - b[i]);
  return Stack(std::move(out));
}

Stack operator*(double s, const Stack& a) {
  std::vector<Point> out;
  out.reserve(a.size());
  for (const auto& b : a.blocks()) out.push_back(s * b);
  return Stack(std::move(out));
}

double lambda_inner(const Stack& x, const Stack& y, const Weights& w) {
  require_compatible(x, y, "lambda_inner");
  require_weights(x, w, "lambda_inner");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * x[i].dot(y[i]);
  return s;
}

double lambda_norm(const Stack& x, const Weights& w) {
  return std::sqrt(std::max(0.0, lambda_inner(x, x, w)));
}

double plain_norm(const Stack& x) {
  double s = 0.0;
  for (const auto& b : x.blocks()) s += b.squared_norm();
  return std::sqrt(s);
}

Stack embed(const Point& x, std::size_t count) {
  if (count < 1) throw DomainError("embed: count must be at least 1");
  return Stack(std::vector<Point>(count, x));
}

Point weighted_average(const Stack& x, const Weights& w) {
  require_weights(x, w, "weighted_average");
  // weights sum to one, so a constant stack averages to its block
  bool constant = true;
  for (std::size_t i = 1; i < x.size() && constant; ++i) constant = x[i] == x[0];
  if (constant) return x[0];
  Point out = Point::zeros(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out += w[i] * x[i];
  return out;
}

}  // namespace drsplit
