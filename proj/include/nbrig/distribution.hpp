// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nbrig/rig.hpp"

namespace nbrig {

// Mixed count distribution: X | lambda ~ NegativeBinomial(r, p = e^{-lambda})
// with lambda drawn from the reciprocal inverse Gaussian mixing law.
struct NbrigParams {
  double r;
  RigParams mix;
  NbrigParams(double r_, RigParams mix_);
  NbrigParams(double r_, double alpha, double m);
};

// Materialized PMF over x = 0..x_max plus the remaining tail mass.
struct PmfTable {
  NbrigParams params;
  std::vector<double> probs;  // index x = 0..x_max
  double tail_mass;
  std::int64_t x_max() const { return static_cast<std::int64_t>(probs.size()) - 1; }
};

// PMF via the alternating sum over mixing-mgf values. Throws PrecisionError
// if the sum cannot be certified to 6 significant digits even at the highest
// working precision.
double pmf_direct(std::int64_t x, const NbrigParams& p);

// PMF via the shifted recursion over the triangular table of size-shifted
// values; never raises a precision error (escalates internally instead).
double pmf_recursive(std::int64_t k, const NbrigParams& p);

// PMF / log-PMF using whichever algorithm carries the smaller certified
// error at this point. log_pmf never returns -inf.
double pmf(std::int64_t x, const NbrigParams& p);
double log_pmf(std::int64_t x, const NbrigParams& p);

double cdf(std::int64_t x, const NbrigParams& p);
double survival(std::int64_t x, const NbrigParams& p);

PmfTable make_pmf_table(const NbrigParams& p, std::int64_t x_max);
// Automatic truncation: extends until pmf(x) < 1e-14 and x > 10*(mean+1).
// Requires alpha > 2 (the mean must exist to place the cutoff).
PmfTable make_pmf_table(const NbrigParams& p);

// E[X(X-1)...(X-k+1)]; exists iff alpha > 2k.
double factorial_moment(int k, const NbrigParams& p);

double mean(const NbrigParams& p);           // needs alpha > 2
double second_moment(const NbrigParams& p);  // needs alpha > 4
double variance(const NbrigParams& p);       // needs alpha > 4

struct DispersionReport {
  double mean;
  double variance;
  double ratio;                // variance / mean, always > 1
  double nb_matched_variance;  // variance of the mean-matched negative binomial
};
DispersionReport dispersion_report(const NbrigParams& p);  // needs alpha > 4

// n draws via the mixture representation; deterministic for a given seed.
std::vector<std::int64_t> sample(std::size_t n, const NbrigParams& p, std::uint64_t seed);

}  // namespace nbrig
