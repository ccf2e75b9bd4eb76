#pragma once

#include <stdexcept>
#include <string>

namespace liouville {

// Bad caller input: out-of-range levels, non-power-of-two sizes, cap refusals.
class ArgumentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Expander sampling could not meet the requested gap within the retry budget.
class GenerationError : public std::runtime_error {
public:
  GenerationError(const std::string& what, double bestGap)
      : std::runtime_error(what), bestGap_(bestGap) {}
  double bestGap() const { return bestGap_; }

private:
  double bestGap_;
};

// Linear solve or eigensolve failed to reach its tolerance.
class NumericError : public std::runtime_error {
public:
  NumericError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_;
};

// Malformed graph file; message carries line and field context.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Structurally well-formed graph file that violates a graph invariant.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace liouville
