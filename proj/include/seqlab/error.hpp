#pragma once

#include <stdexcept>
#include <string>

namespace seqlab {

// Shape disagreement between operands (message names both shapes).
class DimensionError : public std::runtime_error {
public:
  explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Math-domain violation, e.g. log of a non-positive value.
class DomainError : public std::runtime_error {
public:
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Token id outside the vocabulary, or row index outside a table.
class IndexError : public std::runtime_error {
public:
  explicit IndexError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid configuration or flag combination, including mode mismatches
// (attention requested on a non-attention model, missing auxiliary model).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// An operation that needs at least one token received none.
class EmptySequenceError : public std::runtime_error {
public:
  explicit EmptySequenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed corpus data: bad TSV line, unterminated response, empty file.
class CorpusError : public std::runtime_error {
public:
  explicit CorpusError(const std::string& msg) : std::runtime_error(msg) {}
};

// Probability vector that does not sum to 1 within tolerance.
class NormalizationError : public std::runtime_error {
public:
  explicit NormalizationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Loss became NaN during training; message names epoch and batch.
class DivergenceError : public std::runtime_error {
public:
  explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// grad_check detected a loss function that returns different values on
// identical inputs.
class DeterminismError : public std::runtime_error {
public:
  explicit DeterminismError(const std::string& msg) : std::runtime_error(msg) {}
};

// Checkpoint format version not supported by this build.
class VersionError : public std::runtime_error {
public:
  explicit VersionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Checkpoint bytes damaged: bad magic, truncation (message carries the byte
// offset), or checksum mismatch.
class CorruptionError : public std::runtime_error {
public:
  explicit CorruptionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem failure while reading or writing artifacts.
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace seqlab
