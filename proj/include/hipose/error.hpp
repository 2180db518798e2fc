#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hipose {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (PLY, OBJ, JSON-lines, TOML).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Geometrically unusable input: too few points, zero extent, collinear pairs.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// A precondition on sizes or parameters does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Structurally invalid encoding file (bad magic, version, counts).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Encoding file payload does not match its checksum or is truncated.
class ChecksumError : public Error {
 public:
  using Error::Error;
};

/// The solver lost too many correspondences to continue.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, int iteration);

  /// Iteration at which the inlier set collapsed (-1 for the initial solve).
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

}  // namespace hipose
