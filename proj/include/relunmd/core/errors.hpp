#pragma once

#include <stdexcept>
#include <string>

namespace relunmd {

/// Invalid argument: bad rank, shape mismatch, non-finite input, undefined metric.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ShapeError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

}  // namespace relunmd
