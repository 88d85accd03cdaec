#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace splitpack {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Point set is coplanar, collinear or coincident.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened or written.
class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class DegenerateTet : public Error {
 public:
  DegenerateTet(std::size_t index, const std::string& what)
      : Error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Invalid mesh topology (indices out of range, duplicated elements).
class MeshError : public Error {
 public:
  using Error::Error;
};

class DegenerateBox : public Error {
 public:
  using Error::Error;
};

class LeafSplit : public Error {
 public:
  using Error::Error;
};

class NoPlacement : public Error {
 public:
  using Error::Error;
};

class Overflow : public Error {
 public:
  using Error::Error;
};

/// Reassigning elements across a split would leave one side empty.
class DegenerateSplit : public Error {
 public:
  using Error::Error;
};

class NoSplittableNode : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace splitpack
