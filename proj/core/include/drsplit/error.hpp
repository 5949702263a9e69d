#pragma once

#include <stdexcept>
#include <string>

namespace drsplit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// mismatched shapes, block counts or weight lengths
class ShapeError : public Error {
 public:
  using Error::Error;
};

// argument outside the documented domain
class DomainError : public Error {
 public:
  using Error::Error;
};

// resolvent or prox requested outside the single-valued regime
class IllPosedError : public Error {
 public:
  using Error::Error;
};

// an inner solver did not reach its tolerance
class SolveError : public Error {
 public:
  using Error::Error;
};

class PlannerError : public Error {
 public:
  using Error::Error;
};

}  // namespace drsplit
