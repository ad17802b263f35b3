// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "nbrig/compound.hpp"
#include "nbrig/report.hpp"

namespace nbrig {

// Reads a count,frequency CSV (header optional). Rejects negative values,
// duplicate counts and non-integer tokens with path:line-prefixed errors.
CountData ingest_counts(const std::string& path);

// Reads a severity,mass CSV (header optional); severities are positive
// integers, masses nonnegative reals summing to 1.
SeverityPmf load_severity_csv(const std::string& path);

}  // namespace nbrig
