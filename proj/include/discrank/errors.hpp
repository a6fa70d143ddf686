#pragma once

#include <stdexcept>
#include <string>

namespace discrank {

/// Base of every error raised by the library. CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyInput : public Error {
 public:
  EmptyInput() : Error("empty input: no match records") {}
};

class InvalidRecord : public Error {
 public:
  using Error::Error;
};

class DegenerateGame : public Error {
 public:
  using Error::Error;
};

class OriginPlayer : public Error {
 public:
  using Error::Error;
};

class NotTransitive : public Error {
 public:
  using Error::Error;
};

class UnknownPlayer : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class SplitInfeasible : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace discrank
