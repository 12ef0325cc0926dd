#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vwapexec {

// Invalid inputs are reported with std::invalid_argument. Everything the
// numerical layer can fail on at run time derives from Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A strategy whose rates do not integrate to its share count.
class InconsistentStrategy : public Error {
 public:
  using Error::Error;
};

// An inventory curve that increases somewhere, i.e. implies buying.
class NegativeRate : public Error {
 public:
  using Error::Error;
};

class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, std::size_t pivot)
      : Error(what + " (pivot " + std::to_string(pivot) + ")"), pivot_(pivot) {}
  explicit SolverFailure(const std::string& what) : Error(what) {}

  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_ = static_cast<std::size_t>(-1);
};

// The (M_t, B_t) covariance matrix is singular where it must not be.
class DegenerateCovariance : public Error {
 public:
  using Error::Error;
};

}  // namespace vwapexec
