#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace smot {

// Base for every error raised by the toolkit. The CLI maps the concrete
// subclasses onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad flags, missing inputs, unmet preconditions.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Malformed files or records. `where` is a "file:line" style location when known.
class DataError : public Error {
 public:
  DataError(const std::string& what, std::string where = {})
      : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

// A backend response that does not satisfy the requested output schema.
class SchemaError : public DataError {
 public:
  SchemaError(const std::string& what, std::string raw_payload)
      : DataError(what), raw_payload_(std::move(raw_payload)) {}
  const std::string& raw_payload() const noexcept { return raw_payload_; }

 private:
  std::string raw_payload_;
};

// Transport failure talking to a backend, after retries were exhausted.
class BackendError : public Error {
 public:
  BackendError(const std::string& what, std::vector<std::string> attempts = {})
      : Error(what), attempts_(std::move(attempts)) {}
  const std::vector<std::string>& attempts() const noexcept { return attempts_; }

 private:
  std::vector<std::string> attempts_;
};

// A pipeline stage failed. Carries the stage name, the frame (or -1) and the
// identities involved so the failure can be located in a long run.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what, int frame = -1,
             std::vector<int> identities = {});
  const std::string& stage() const noexcept { return stage_; }
  int frame() const noexcept { return frame_; }
  const std::vector<int>& identities() const noexcept { return identities_; }

 private:
  std::string stage_;
  int frame_;
  std::vector<int> identities_;
};

}  // namespace smot
