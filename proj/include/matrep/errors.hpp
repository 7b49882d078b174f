#pragma once

#include <stdexcept>

namespace matrep {

/// Input that cannot be brought onto the unit sphere (zero norm, non-finite entries).
class DegenerateInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ShapeMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed on-disk data: embedding files, label files, benchmark TSVs.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace matrep
