#pragma once

#include <stdexcept>
#include <string>

namespace cascadelab {

/// Base error carrying a short machine-readable code ("MeanNotOne", "WrongRegime", ...).
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

private:
  std::string code_;
};

/// Malformed input: bad spec file, bad probabilities, bad arguments. CLI exit 2.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Operation called outside the hypotheses of the theorem it implements. CLI exit 3.
class RegimeError : public Error {
public:
  using Error::Error;
};

/// Resource guard tripped (tree too large, enumeration too large). CLI exit 4.
class ResourceError : public Error {
public:
  using Error::Error;
};

}  // namespace cascadelab
