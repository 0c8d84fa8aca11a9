#pragma once

#include <stdexcept>
#include <string>

namespace b3c {

// Bad run configuration: out-of-range values, unknown keys, malformed text.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes that cannot line up: dataset vs env dims, net vs input, etc.
class DimensionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Call-sequence violations, e.g. stepping an episode past its end.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training blew up: non-finite loss or runaway target values.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(long step, const std::string& what)
      : std::runtime_error(what), step(step) {}
  long step;
};

enum class IoErrorKind {
  kOpenFailed,
  kBadMagic,
  kBadVersion,
  kTruncated,
  kBadChecksum,
  kMalformed,
};

class IoError : public std::runtime_error {
 public:
  IoError(IoErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind(kind) {}
  IoErrorKind kind;
};

}  // namespace b3c
