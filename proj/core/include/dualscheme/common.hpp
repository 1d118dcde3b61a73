#pragma once

#include <Eigen/Core>

#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace dualscheme {

using Vec = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed caller input: dimension mismatches, parameters outside their domain.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent configuration: unknown identifiers, merit kind not matching the problem form.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Evaluation outside a function's domain (e.g. P'(s, t) with s >= a).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A grid oracle found no point within the requested feasibility slack.
class InfeasibleAtResolution : public Error {
 public:
  using Error::Error;
};

/// The inner solver ran out of evaluations before certifying its result.
class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, Vec best_x, double best_value, double gap)
      : Error(what), best_x_(std::move(best_x)), best_value_(best_value), gap_(gap) {}

  const Vec& best_x() const { return best_x_; }
  double best_value() const { return best_value_; }
  double gap() const { return gap_; }

 private:
  Vec best_x_;
  double best_value_;
  double gap_;
};

inline void require_dimension(const Vec& v, Eigen::Index expected, const char* what) {
  if (v.size() != expected) {
    throw InputError(std::string(what) + ": expected dimension " + std::to_string(expected) +
                     ", got " + std::to_string(v.size()));
  }
}

}  // namespace dualscheme
