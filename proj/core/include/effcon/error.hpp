#pragma once

#include <stdexcept>
#include <string>

namespace effcon {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace effcon
