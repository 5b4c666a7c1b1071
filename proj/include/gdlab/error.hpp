#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gdlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A graph that was required to be connected is not.
class DisconnectedGraphError : public Error {
 public:
  DisconnectedGraphError(std::vector<std::size_t> unreachable)
      : Error(describe(unreachable)), unreachable_(std::move(unreachable)) {}

  /// Nodes not reachable from the first node (or the requested start).
  const std::vector<std::size_t>& unreachable() const noexcept { return unreachable_; }

 private:
  static std::string describe(const std::vector<std::size_t>& nodes) {
    std::string msg = "graph is disconnected; unreachable component of " +
                      std::to_string(nodes.size()) + " node(s) including node " +
                      (nodes.empty() ? std::string("?") : std::to_string(nodes.front()));
    return msg;
  }

  std::vector<std::size_t> unreachable_;
};

/// Numerically degenerate input (coincident points, zero-length edges, ...).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace gdlab
