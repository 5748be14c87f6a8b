#pragma once

#include <stdexcept>
#include <string>

namespace acro {

// Malformed input: bad JSON, schema mismatch, invariant violation.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MissingAcronymError : public ValidationError {
 public:
  explicit MissingAcronymError(const std::string& acronym)
      : ValidationError("acronym not in dictionary: " + acronym), acronym_(acronym) {}
  const std::string& acronym() const noexcept { return acronym_; }

 private:
  std::string acronym_;
};

// A required file (checkpoint, tokenizer, predictions) does not exist.
class MissingArtifactError : public std::runtime_error {
 public:
  explicit MissingArtifactError(const std::string& path)
      : std::runtime_error("missing artifact: " + path), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// Loss became NaN or infinite during training.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace acro
