#pragma once

#include <stdexcept>

namespace whitelasso {

// Input is well-formed but carries no information for the requested estimate
// (zero lag denominator, response orthogonal to every column, ...).
class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace whitelasso
