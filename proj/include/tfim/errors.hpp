#pragma once

#include <stdexcept>
#include <string>

namespace tfim {

// Thrown when a brute-force operation is asked to exceed its size cap.
class SizeGuardError : public std::runtime_error {
 public:
  explicit SizeGuardError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown by the tail fit when the window holds too few populated bins.
class InsufficientDataError : public std::runtime_error {
 public:
  explicit InsufficientDataError(const std::string& what)
      : std::runtime_error(what) {}
};

// Thrown when a quantity that must be real carries an imaginary residue,
// which signals an inconsistent state/operator combination.
class ResidueError : public std::runtime_error {
 public:
  explicit ResidueError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tfim
