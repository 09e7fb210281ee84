#pragma once

#include <stdexcept>
#include <string>

namespace sidewalk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented invariant (bad ring, bad parameter, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Filesystem or container-format failure.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed document; `byte_offset` is the 1-based position of the offending byte.
class ParseError : public IoError {
 public:
  ParseError(const std::string& what, std::size_t byte_offset)
      : IoError(what), byte_offset_(byte_offset) {}

  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

/// A boolean operation produced (or was fed) an invalid ring.
class TopologyError : public Error {
 public:
  TopologyError(const std::string& what, std::size_t ring_index)
      : Error(what), ring_index_(ring_index) {}

  std::size_t ring_index() const noexcept { return ring_index_; }

 private:
  std::size_t ring_index_;
};

}  // namespace sidewalk
