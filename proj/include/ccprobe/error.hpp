#pragma once

#include <stdexcept>
#include <string>

namespace ccprobe {

/// Broad failure category; the CLI maps each to a distinct exit code.
enum class ErrorKind {
  config,  // bad arguments, missing files, out-of-range selections
  data,    // malformed or inconsistent file contents, violated preconditions
  budget,  // search-space guard exceeded
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error config_error(const std::string& what) { return Error(ErrorKind::config, what); }
inline Error data_error(const std::string& what) { return Error(ErrorKind::data, what); }

}  // namespace ccprobe
