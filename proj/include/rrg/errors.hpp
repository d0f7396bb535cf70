#pragma once

#include <stdexcept>
#include <string>

namespace rrg {

struct dimension_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct parity_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Exact enumeration requested above a configured size cap.
struct capacity_error : std::length_error {
  using std::length_error::length_error;
};

struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

struct retry_limit_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct optimization_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rrg
