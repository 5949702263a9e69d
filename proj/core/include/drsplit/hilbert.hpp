#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace drsplit {

enum class ShapeKind { vector, symmetric_matrix };

struct Shape {
  ShapeKind kind = ShapeKind::vector;
  Eigen::Index dim = 0;  // n for vectors, p for p x p matrices

  Eigen::Index entries() const { return kind == ShapeKind::vector ? dim : dim * dim; }
  std::string describe() const;
  friend bool operator==(const Shape&, const Shape&) = default;
};

// Element of H: a dense vector or a symmetric matrix.
class Point {
 public:
  Point() = default;

  static Point vector(Eigen::VectorXd v);
  static Point vector(std::initializer_list<double> v);
  static Point scalar(double v);
  // symmetrized as (X + X^T) / 2
  static Point symmetric(const Eigen::MatrixXd& m);
  static Point zeros(const Shape& shape);

  const Shape& shape() const { return shape_; }
  // n x 1 for vectors, p x p for matrices
  const Eigen::MatrixXd& values() const { return data_; }
  Eigen::Index entries() const { return shape_.entries(); }
  double at(Eigen::Index i) const { return data_.reshaped()(i); }
  Eigen::VectorXd flat() const { return data_.reshaped(); }

  double dot(const Point& other) const;
  double squared_norm() const { return data_.squaredNorm(); }
  double norm() const { return data_.norm(); }
  // squared norm divided by the entry count (p^2 for matrices)
  double mean_square() const;
  double max_abs() const { return data_.cwiseAbs().maxCoeff(); }

  Point operator-() const;
  Point& operator+=(const Point& other);
  Point& operator-=(const Point& other);
  Point& operator*=(double s);
  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(Point a, double s) { return a *= s; }
  friend Point operator*(double s, Point a) { return a *= s; }

  // same shape, entries rebuilt from a flat vector (matrices re-symmetrized)
  Point with_flat(const Eigen::VectorXd& flat) const;

  friend bool operator==(const Point& a, const Point& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  Point(Shape shape, Eigen::MatrixXd data) : shape_(shape), data_(std::move(data)) {}
  void require_same_shape(const Point& other, const char* op) const;

  Shape shape_{};
  Eigen::MatrixXd data_{Eigen::MatrixXd(0, 1)};
};

class Weights {
 public:
  explicit Weights(std::vector<double> lambdas);
  static Weights equal(std::size_t count);

  std::size_t size() const { return lambdas_.size(); }
  double operator[](std::size_t i) const { return lambdas_[i]; }
  const std::vector<double>& values() const { return lambdas_; }
  double min() const;
  double max() const;

  friend bool operator==(const Weights&, const Weights&) = default;

 private:
  std::vector<double> lambdas_;
};

// Element of H^{m-1}. A default-constructed Stack is empty and only used as a
// placeholder before the first step.
class Stack {
 public:
  Stack() = default;
  explicit Stack(std::vector<Point> blocks);

  std::size_t size() const { return blocks_.size(); }
  bool empty() const { return blocks_.empty(); }
  const Point& operator[](std::size_t i) const { return blocks_[i]; }
  const std::vector<Point>& blocks() const { return blocks_; }
  const Shape& shape() const;

  Stack operator-() const;
  friend Stack operator+(const Stack& a, const Stack& b);
  friend Stack operator-(const Stack& a, const Stack& b);
  friend Stack operator*(double s, const Stack& a);
  friend Stack operator*(const Stack& a, double s) { return s * a; }

  friend bool operator==(const Stack&, const Stack&) = default;

 private:
  std::vector<Point> blocks_;
};

double lambda_inner(const Stack& x, const Stack& y, const Weights& w);
double lambda_norm(const Stack& x, const Weights& w);
// plain product-space norm, sum of block squared norms
double plain_norm(const Stack& x);
Stack embed(const Point& x, std::size_t count);
Point weighted_average(const Stack& x, const Weights& w);

}  // namespace drsplit
