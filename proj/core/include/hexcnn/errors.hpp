#pragma once

#include <stdexcept>
#include <string>

namespace hexcnn {

/// Raised when tensor shapes or channel counts do not line up.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for convolution/pooling geometry that cannot tile the input.
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by readers when a file is truncated, mislabelled or malformed.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hexcnn
