#pragma once

#include <stdexcept>
#include <string>

namespace periwave {

/// An iterative solver exhausted its iteration budget.
class NotConverged : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The instability criterion does not apply to the requested operator
/// (its low spectrum lacks the negative/zero/positive shape).
class CriterionInapplicable : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// The sufficient condition for transverse instability fails.
class CriterionNotMet : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

} // namespace periwave
