#pragma once

#include <stdexcept>
#include <string>

namespace appsplit {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Archive / model errors.
class MalformedArchive : public Error {
 public:
  using Error::Error;
};

class SchemaViolation : public Error {
 public:
  SchemaViolation(const std::string& entity, const std::string& what)
      : Error("schema violation at '" + entity + "': " + what), entity_(entity) {}
  const std::string& entity() const { return entity_; }

 private:
  std::string entity_;
};

// Graph query errors.
class UnknownActivity : public Error {
 public:
  using Error::Error;
};

class UnknownClass : public Error {
 public:
  using Error::Error;
};

// Decomposition errors.
class InvalidSelection : public Error {
 public:
  using Error::Error;
};

class ActivityInBase : public Error {
 public:
  using Error::Error;
};

// Script errors.
class MalformedScript : public Error {
 public:
  using Error::Error;
};

class InvalidScript : public Error {
 public:
  using Error::Error;
};

class NonTermination : public Error {
 public:
  using Error::Error;
};

// Runtime / store errors.
class StoreUnavailable : public Error {
 public:
  using Error::Error;
};

class AlreadyInstalled : public Error {
 public:
  using Error::Error;
};

class NotInstalled : public Error {
 public:
  using Error::Error;
};

class StubPoolExhausted : public Error {
 public:
  using Error::Error;
};

class NoMatchingActivity : public Error {
 public:
  using Error::Error;
};

class MergeConflict : public Error {
 public:
  using Error::Error;
};

class LoadConflict : public Error {
 public:
  using Error::Error;
};

/// Thrown by the virtual runtime when a decomposed app references a class or
/// resource that is not loaded. Recovered plans never trigger this.
class MissingAtRuntime : public Error {
 public:
  using Error::Error;
};

class MalformedCsv : public Error {
 public:
  using Error::Error;
};

}  // namespace appsplit
