#pragma once

#include <stdexcept>
#include <string>

namespace deqe {

// Base for problems with input data (misaligned corpora, malformed files).
// Parameter misuse is reported with std::invalid_argument instead.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AlignmentError : public DataError {
 public:
  using DataError::DataError;
};

class FormatError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace deqe
