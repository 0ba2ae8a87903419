#pragma once

#include <stdexcept>
#include <string>

namespace airsim {

// Precondition on a numeric argument does not hold.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A configuration or input record failed validation. `field()` names the
// offending key so callers can report it back to the user.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  IoError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// Training gave up before reaching its target. Carries the best metrics seen.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, double best_loss, double best_accuracy)
      : std::runtime_error(what), best_loss_(best_loss), best_accuracy_(best_accuracy) {}
  double best_loss() const noexcept { return best_loss_; }
  double best_accuracy() const noexcept { return best_accuracy_; }

 private:
  double best_loss_;
  double best_accuracy_;
};

}  // namespace airsim
