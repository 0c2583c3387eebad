#ifndef TA2S2_ERROR_HPP_
#define TA2S2_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace ta2s2 {

// Invalid argument values (non-positive length-scales, out-of-range inputs).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Matrix could not be Cholesky-factorised, even after the jitter ladder.
class FactorisationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// H(phi|D) could not be evaluated. Samplers treat this as H = +inf.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// All importance weights vanished (every H infinite).
class DegenerateWeightsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InitialisationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LevelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LadderCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ta2s2

#endif  // TA2S2_ERROR_HPP_
