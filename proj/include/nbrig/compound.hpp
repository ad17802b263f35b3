// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nbrig/distribution.hpp"

namespace nbrig {

// Claim-severity distribution on the positive integers.
struct SeverityPmf {
  std::vector<double> probs;  // index y = 0..max_y(); probs[0] is always 0
  explicit SeverityPmf(const std::vector<std::pair<std::int64_t, double>>& entries);
  std::int64_t max_y() const { return static_cast<std::int64_t>(probs.size()) - 1; }
  bool is_unit_mass_at_one() const;
};

// Aggregate-loss distribution: atom at 0 plus masses over 1..x_max.
struct AggregateDist {
  NbrigParams params;
  double atom0;
  std::vector<double> probs;  // index 0 holds g(1), ...; x = 1..x_max
  double tail_mass;
  std::string method;  // "recursion", "bruteforce" or "count" (unit severity)
  std::int64_t x_max() const { return static_cast<std::int64_t>(probs.size()); }
  double mass(std::int64_t x) const;
};

struct AggregateOptions {
  // When severity is a unit mass at 1 the aggregate law equals the count law;
  // the reduction reuses the count-PMF table directly. Disable to force the
  // general recursion (used by its cross-validation tests).
  bool allow_count_reduction = true;
};

// Aggregate PMF via the shifted two-sequence recursion. Falls back to the
// convolution oracle (method = "bruteforce") if the recursion produces a
// mass below -1e-10.
AggregateDist aggregate_pmf(const NbrigParams& p, const SeverityPmf& f, std::int64_t x_max,
                            const AggregateOptions& opts = {});

// Oracle: sum_{n=0..n_max} pmf(n) * f^{*n} by repeated discrete convolution.
AggregateDist aggregate_bruteforce(const NbrigParams& p, const SeverityPmf& f,
                                   std::int64_t x_max, std::int64_t n_max);

struct ConvResult {
  std::vector<double> probs;  // index 0..x_max
  double tail;                // mass pushed beyond x_max
};

// Truncated discrete convolution of two sub-probability vectors indexed from 0.
ConvResult convolve(const std::vector<double>& a, const std::vector<double>& b,
                    std::int64_t x_max);

}  // namespace nbrig
