#include "codazzi/error.hpp"

namespace codazzi {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::curvature: return "curvature";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::sonic: return "sonic";
    case ErrorKind::region: return "region";
    case ErrorKind::config: return "config";
    case ErrorKind::structure: return "structure";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace codazzi
