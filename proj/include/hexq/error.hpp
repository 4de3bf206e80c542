#pragma once

#include <stdexcept>
#include <string>

namespace hexq {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid sizes, shapes, or option values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A move onto an occupied or off-board cell.
class IllegalMoveError : public Error {
 public:
  using Error::Error;
};

/// A move after the game has already been decided.
class GameOverError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input (cell names, database files, config files).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Weight files that are truncated, corrupt, or do not match the requested config.
class LoadError : public Error {
 public:
  using Error::Error;
};

/// An API was called with its preconditions violated.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace hexq
