#pragma once

#include <stdexcept>
#include <string>

namespace gmerton {

// Argument validation failures use std::invalid_argument directly. The
// types below cover the remaining failure classes surfaced to callers.

/// A strategy formula would divide by zero (e.g. sigma == sigma_r in the
/// stochastic-rate model).
class SingularParameters : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A request exceeds a configured size cap (lattice depth, node count).
class ResourceLimit : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace gmerton
