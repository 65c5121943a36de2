#pragma once

#include <stdexcept>
#include <string>

namespace drvote {

// Error taxonomy, mirrored by CLI exit codes:
// Parse/usage -> 2, Capacity -> 3, everything else -> 1.
enum class ErrorKind { Parse, Capacity, Domain, Internal };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_parse(const std::string& msg) {
  throw Error(ErrorKind::Parse, msg);
}
[[noreturn]] inline void fail_capacity(const std::string& msg) {
  throw Error(ErrorKind::Capacity, msg);
}
[[noreturn]] inline void fail_domain(const std::string& msg) {
  throw Error(ErrorKind::Domain, msg);
}
[[noreturn]] inline void fail_internal(const std::string& msg) {
  throw Error(ErrorKind::Internal, msg);
}

}  // namespace drvote
