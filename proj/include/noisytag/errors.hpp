#pragma once

#include <stdexcept>
#include <string>

namespace noisytag {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Waveform-level failures.
struct ZeroEnergy : Error {
  explicit ZeroEnergy(const std::string& what) : Error(what) {}
};
struct LengthMismatch : Error {
  explicit LengthMismatch(const std::string& what) : Error(what) {}
};
struct BadSpec : Error {
  explicit BadSpec(const std::string& what) : Error(what) {}
};

// Corpus / manifest failures.
struct ParseError : Error {
  explicit ParseError(const std::string& what) : Error(what) {}
};
struct InvariantViolation : Error {
  explicit InvariantViolation(const std::string& what) : Error(what) {}
};
struct EmptyPool : Error {
  explicit EmptyPool(const std::string& what) : Error(what) {}
};
struct OverlapViolation : Error {
  explicit OverlapViolation(const std::string& what) : Error(what) {}
};
struct MissingTags : Error {
  explicit MissingTags(const std::string& what) : Error(what) {}
};

// Model / loss failures.
struct ShapeMismatch : Error {
  explicit ShapeMismatch(const std::string& what) : Error(what) {}
};
struct BatchTooSmall : Error {
  explicit BatchTooSmall(const std::string& what) : Error(what) {}
};
struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error(what) {}
};

// Metric failures.
struct DegenerateLabels : Error {
  explicit DegenerateLabels(const std::string& what) : Error(what) {}
};
struct AllTagsDegenerate : Error {
  explicit AllTagsDegenerate(const std::string& what) : Error(what) {}
};

// Training / artifact failures.
struct DivergenceDetected : Error {
  explicit DivergenceDetected(const std::string& what) : Error(what) {}
};
struct CorruptCheckpoint : Error {
  explicit CorruptCheckpoint(const std::string& what) : Error(what) {}
};
struct ConfigMismatch : Error {
  explicit ConfigMismatch(const std::string& what) : Error(what) {}
};
struct MissingCheckpoint : Error {
  explicit MissingCheckpoint(const std::string& what) : Error(what) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(what) {}
};
struct IoError : Error {
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace noisytag
