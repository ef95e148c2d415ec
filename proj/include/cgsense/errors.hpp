#pragma once

#include <stdexcept>
#include <string>

namespace cgsense {

// Error kinds map onto CLI exit codes: usage -> 2, data -> 3, numeric -> 4.
enum class ErrorKind { usage, data, numeric, io };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string msg) : std::runtime_error(std::move(msg)), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_usage(const std::string& msg) { throw Error(ErrorKind::usage, msg); }
[[noreturn]] inline void fail_data(const std::string& msg) { throw Error(ErrorKind::data, msg); }
[[noreturn]] inline void fail_numeric(const std::string& msg) { throw Error(ErrorKind::numeric, msg); }
[[noreturn]] inline void fail_io(const std::string& msg) { throw Error(ErrorKind::io, msg); }

}  // namespace cgsense
