#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace codom {

/// Arithmetic on bounds overflowed, or -inf and +inf were combined.
/// Bound arithmetic never wraps silently.
struct OverflowError : std::runtime_error {
  explicit OverflowError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by shared_build when a declaration list is ill-formed.
struct BuildError : std::runtime_error {
  enum class Code {
    UnknownDependency,
    ForwardReference,
    ArityMismatch,
    KindMismatch,
    DuplicateName,
  };
  Code code;
  BuildError(Code c, const std::string& what) : std::runtime_error(what), code(c) {}
};

/// Instance parse failure; carries the 1-based line and token position.
struct ParseError : std::runtime_error {
  enum class Code {
    MalformedHeader,
    TruncatedJobLine,
    MachineIdOutOfRange,
    NonPositiveDuration,
  };
  Code code;
  int line;
  int token;
  ParseError(Code c, int line_no, int token_no, const std::string& what)
      : std::runtime_error(what), code(c), line(line_no), token(token_no) {}
};

/// Branching was asked to split a variable with no finite lower bound.
struct SearchError : std::runtime_error {
  explicit SearchError(const std::string& what) : std::runtime_error(what) {}
};

/// The brute-force scheduling oracle refused an instance that is too large.
struct SizeGuardError : std::runtime_error {
  explicit SizeGuardError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace codom
