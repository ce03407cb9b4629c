#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gyro {

// Configuration or precondition problems: the CLI maps these to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Failures detected while computing: the CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TruncationInsufficient : public NumericalError {
 public:
  TruncationInsufficient(const std::string& what, double tail)
      : NumericalError(what), tail_(tail) {}
  double tail() const { return tail_; }

 private:
  double tail_;
};

class BoxTooSmall : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class StepRejected : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateNormalization : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SupportTooLarge : public NumericalError {
 public:
  SupportTooLarge(const std::string& what, std::size_t cells)
      : NumericalError(what), cells_(cells) {}
  std::size_t cells() const { return cells_; }

 private:
  std::size_t cells_;
};

class MarkerLeftBox : public NumericalError {
 public:
  MarkerLeftBox(const std::string& what, std::size_t index)
      : NumericalError(what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

class OutOfBox : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace gyro
