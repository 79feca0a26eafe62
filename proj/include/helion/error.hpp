#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace helion {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed wire text: tokens, corpus lines, model and policy files.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Inputs that parse but violate a precondition.
class InputError : public Error {
 public:
  using Error::Error;
};

// Routines whose instance demand exceeds the slots available to them.
class ScheduleError : public Error {
 public:
  ScheduleError(const std::string& what, std::vector<std::string> routines)
      : Error(what), routines_(std::move(routines)) {}

  const std::vector<std::string>& routines() const noexcept { return routines_; }

 private:
  std::vector<std::string> routines_;
};

}  // namespace helion
