#pragma once

#include <stdexcept>
#include <string>

namespace robim {

enum class ErrorKind {
  io,          // missing files, unwritable directories
  parse,       // malformed manifests, XML, schema violations
  reference,   // dangling ids, unresolved skills, unknown keys
  invariant,   // type invariant violations caught at load or runtime
  planning,    // no path, no feasible carry orientation
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace robim
