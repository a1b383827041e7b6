#ifndef RETFRONT_ERRORS_HPP
#define RETFRONT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace retfront {

/// Operands built over different variable layouts or truncation orders.
class ContextMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed polynomial text or unknown variable name.
class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A caller violated an operation's precondition (unit germ, missing role, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The jet space requested is larger than the configured dimension cap.
class DimensionCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace retfront

#endif  // RETFRONT_ERRORS_HPP
