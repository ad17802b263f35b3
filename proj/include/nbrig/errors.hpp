// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace nbrig {

// Thrown when a cancellation-prone sum cannot be certified to the required
// accuracy even at the highest working precision.
struct PrecisionError : std::runtime_error {
  explicit PrecisionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nbrig
