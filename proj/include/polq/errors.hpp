#pragma once

#include <stdexcept>
#include <string>

namespace polq {

/// Input describes something unphysical (|r| > 1, non-unitary waveplate, non-PSD chi, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Input is well-formed but carries no usable information (zero normalization, all-zero t).
class DegenerateInput : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical search ended above its acceptance threshold.
class ConvergenceFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace polq
