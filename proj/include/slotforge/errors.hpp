#pragma once

#include <stdexcept>
#include <string>

namespace slotforge {

/// Input violates a documented domain invariant (bad geometry, bad target row, ...).
struct validation_error : std::runtime_error {
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A file exists but its schema/header/version does not match what was expected.
struct schema_error : std::runtime_error {
  explicit schema_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Matrix/vector dimensions (or frequency grids) do not line up.
struct shape_error : std::runtime_error {
  explicit shape_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem-level failure (unreadable/unwritable path).
struct io_error : std::runtime_error {
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace slotforge
