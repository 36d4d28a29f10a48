#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mfd {

// Error families map onto CLI exit codes (2 config, 3 data, 4 provider, 5 internal).
enum class ErrorCategory { config, data, provider, internal };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, std::string type, const std::string& message)
      : std::runtime_error(message), category_(category), type_(std::move(type)) {}

  ErrorCategory category() const noexcept { return category_; }
  const std::string& type() const noexcept { return type_; }

 private:
  ErrorCategory category_;
  std::string type_;
};

#define MFD_DEFINE_ERROR(Name, Category)                                   \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& message)                              \
        : Error(ErrorCategory::Category, #Name, message) {}                \
  };

// corpus
MFD_DEFINE_ERROR(EmptyDocument, data)
MFD_DEFINE_ERROR(LabelRangeError, data)
MFD_DEFINE_ERROR(InvalidFractions, config)
MFD_DEFINE_ERROR(DatasetError, data)
// features
MFD_DEFINE_ERROR(DegenerateInput, data)
MFD_DEFINE_ERROR(StatsMismatch, data)
// tensor core
MFD_DEFINE_ERROR(ShapeMismatch, internal)
MFD_DEFINE_ERROR(NotScalar, internal)
MFD_DEFINE_ERROR(MissingGrad, internal)
MFD_DEFINE_ERROR(CheckpointError, data)
// providers
MFD_DEFINE_ERROR(EmptyCompletion, provider)
MFD_DEFINE_ERROR(PreconditionError, data)
// model
MFD_DEFINE_ERROR(ZeroVector, internal)
MFD_DEFINE_ERROR(InvalidMargin, config)
MFD_DEFINE_ERROR(ModelNotLoaded, config)
// evaluation
MFD_DEFINE_ERROR(LengthMismatch, data)
MFD_DEFINE_ERROR(NonBinaryLabels, data)

#undef MFD_DEFINE_ERROR

class SchemaError : public Error {
 public:
  SchemaError(std::size_t line, const std::string& message)
      : Error(ErrorCategory::data, "SchemaError",
              "line " + std::to_string(line) + ": " + message),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(ErrorCategory::config, "ConfigError", field + ": " + message),
        field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Carries how many attempts were made and the last backoff so callers can reschedule.
class ProviderError : public Error {
 public:
  ProviderError(const std::string& message, int attempts, double last_backoff_ms)
      : ProviderError("ProviderError", message, attempts, last_backoff_ms) {}
  int attempts() const noexcept { return attempts_; }
  double last_backoff_ms() const noexcept { return last_backoff_ms_; }

 protected:
  ProviderError(std::string type, const std::string& message, int attempts,
                double last_backoff_ms)
      : Error(ErrorCategory::provider, std::move(type), message),
        attempts_(attempts),
        last_backoff_ms_(last_backoff_ms) {}

 private:
  int attempts_;
  double last_backoff_ms_;
};

class LlmUnavailable : public ProviderError {
 public:
  LlmUnavailable(const std::string& message, int attempts, double last_backoff_ms)
      : ProviderError("LlmUnavailable", message, attempts, last_backoff_ms) {}
};

}  // namespace mfd
