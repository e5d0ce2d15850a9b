#pragma once

#include <stdexcept>
#include <string>

namespace pctate {

// Base for all library errors. exit_code() maps to the CLI convention:
// 2 = input/config error, 3 = numerical failure.
class Error : public std::runtime_error {
  public:
    Error(std::string msg, int exit_code) : std::runtime_error(std::move(msg)), exit_code_(exit_code) {}
    int exit_code() const { return exit_code_; }

  private:
    int exit_code_;
};

class InputError : public Error {
  public:
    explicit InputError(std::string msg) : Error(std::move(msg), 2) {}
};

class NumericalError : public Error {
  public:
    explicit NumericalError(std::string msg) : Error(std::move(msg), 3) {}
};

class ParseError : public InputError {
  public:
    using InputError::InputError;
};

class SchemaError : public InputError {
  public:
    using InputError::InputError;
};

class MissingGroup : public InputError {
  public:
    using InputError::InputError;
};

class EmptyInput : public InputError {
  public:
    using InputError::InputError;
};

class InvalidShare : public InputError {
  public:
    using InputError::InputError;
};

class DimensionError : public InputError {
  public:
    using InputError::InputError;
};

class NonPositiveOutcome : public InputError {
  public:
    using InputError::InputError;
};

class NoControlGroup : public InputError {
  public:
    using InputError::InputError;
};

class EmptyTreatment : public InputError {
  public:
    using InputError::InputError;
};

class EmptyAggregation : public InputError {
  public:
    using InputError::InputError;
};

class SingularDesign : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

class DegenerateClusters : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

class InvalidCovariance : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

class DegenerateInference : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

}  // namespace pctate
