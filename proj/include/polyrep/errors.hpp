#pragma once

#include <stdexcept>
#include <string>

namespace polyrep {

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NonOrthonormalDirections : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ZeroFunction : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct OddWidth : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NotAtInit : std::logic_error {
  using std::logic_error::logic_error;
};

struct StepSizeTooLarge : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NonFinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularSystem : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConstructionFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IndexOutOfRange : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct InsufficientPrecision : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace polyrep
