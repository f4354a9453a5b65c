#pragma once

#include <stdexcept>
#include <string>

namespace dualprob {

/// A caller broke a documented precondition (bad index, empty list, ...).
class usage_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input is well-formed but mathematically outside the operation's domain.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Two independent computations of the same quantity disagreed.
class invariant_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace dualprob
