#pragma once

#include <stdexcept>
#include <string>

namespace radarmot {

/// Base type for every error this library raises.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// geometry
class DegenerateBearing : public Error { public: using Error::Error; };
class InvalidFactor : public Error { public: using Error::Error; };

// radar preprocessing
class EmptyBundle : public Error { public: using Error::Error; };

// filtering
class NegativeDt : public Error { public: using Error::Error; };
class SingularInnovationCovariance : public Error { public: using Error::Error; };
class EmptyPointSet : public Error { public: using Error::Error; };

// metrics
class InvalidRecall : public Error { public: using Error::Error; };
class NoPositives : public Error { public: using Error::Error; };

// scenario generation / configuration
class InvalidConfig : public Error { public: using Error::Error; };

// file formats
class NonMonotonicTime : public Error { public: using Error::Error; };
class VersionUnsupported : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };

/// Malformed input record; carries the 1-based line number when known.
class SchemaMismatch : public Error {
 public:
  explicit SchemaMismatch(const std::string& msg, long line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  long line() const { return line_; }

 private:
  long line_ = 0;
};

}  // namespace radarmot
