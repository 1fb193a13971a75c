#ifndef SALRANK_ERRORS_HPP
#define SALRANK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace salrank {

// Malformed input, violated invariant, or bad configuration.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read, or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace salrank

#endif  // SALRANK_ERRORS_HPP
