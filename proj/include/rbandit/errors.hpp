#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rbandit {

// Bad user-supplied value (non-finite reward, malformed file, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numeric parameter outside its admissible range.
class ParameterError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Query on an empty accumulator.
class EmptyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class HorizonExhausted : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by checked-mode bound evaluators; carries every failed inequality.
class ConditionNotMet : public std::runtime_error {
 public:
  explicit ConditionNotMet(std::vector<std::string> failed);
  const std::vector<std::string>& failed() const { return failed_; }

 private:
  std::vector<std::string> failed_;
};

}  // namespace rbandit
