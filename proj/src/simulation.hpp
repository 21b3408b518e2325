#pragma once

#include <cstdint>
#include <vector>

#include "dynamics.hpp"

namespace bnbar {

inline constexpr long long kDefaultBurnIn = 500;

struct SimulatedPath {
  ModelSpec model;
  std::uint64_t seed = 0;
  long long burn_in = 0;
  std::vector<long long> y;
  std::vector<double> lambda;  // intensity that generated y[t]
  long long clamp_hits = 0;    // gas log intensity window hits, whole run
  // contamination record, empty for clean paths
  std::vector<long long> outlier_positions;
  std::vector<double> outlier_magnitudes;
};

// Draws a path of length n after discarding burn_in steps, starting the
// recursion at the long run level. Specs that fail their strict
// stationarity check are refused unless allow_nonstationary is set, in
// which case an undefined level falls back to omega (ingarch) or
// exp(omega) (gas).
SimulatedPath simulate(const ModelSpec& m, long long n, long long burn_in,
                       std::uint64_t seed, bool allow_nonstationary = false);

// Copy of the path with y[positions[i]] overwritten by
// llround(magnitudes[i] * mean(y)). The intensity path is left as
// generated; only the observations are contaminated. Positions must be
// distinct and in range, magnitudes positive.
SimulatedPath inject_outliers(const SimulatedPath& path,
                              const std::vector<long long>& positions,
                              const std::vector<double>& magnitudes);

}  // namespace bnbar
