#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace codazzi {

enum class ErrorKind {
  domain,        ///< coordinate outside the declared metric domain
  curvature,     ///< κ >= 0 where strict negativity is required
  degenerate,    ///< EG - F^2 <= 0 or frame collapse
  sonic,         ///< q too close to 1
  region,        ///< state outside the diamond invariant region
  config,        ///< invalid parameters or configuration
  structure,     ///< metric not of the form an operation requires
  numerical,     ///< NaN, overflow, step underflow, nonconvergence
  io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace codazzi
