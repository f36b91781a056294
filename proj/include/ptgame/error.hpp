#pragma once

#include <stdexcept>
#include <string>

namespace ptgame {

/// Input failed a structural or numeric invariant. `field()` carries a
/// dotted path (e.g. `distribution.probs`) when the failure maps to a
/// scenario-file field, and is empty otherwise.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg, std::string field = {})
      : std::runtime_error(field.empty() ? msg : field + ": " + msg),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A reward or value function was evaluated outside its domain, or produced
/// a non-finite number.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Brute-force certification would exceed the configured evaluation budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ptgame
