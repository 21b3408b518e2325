#pragma once

// Shared oracle helpers for the test binaries. Everything here recomputes
// quantities by routes independent of the library internals under test:
// plain summation of exp(log pmf) with analytic tail corrections, and
// empirical histogram distances.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "distributions.hpp"

namespace testsup {

struct PmfSums {
  double mass = 0.0;
  double mean = 0.0;
  double second = 0.0;
  long long y_stop = 0;
};

// Sums pmf, y*pmf and y^2*pmf by the ratio recurrence, then closes the
// tail analytically. Deep in the tail the pmf behaves like
// A * y^-(alpha+1) * (1 + c1/y) with c1 fixed by the gamma-ratio
// expansion, and sum_{k>Y} k^-s is (Y+1/2)^(1-s)/(s-1) to O(Y^-s-1) by
// the midpoint rule. Stopping once |c1|/Y and the relative tail weight
// are both small keeps the corrected sums well under 1e-7 relative even
// for tail index alpha just above 2.
inline PmfSums sum_bnb_pmf(const bnbar::BnbParams& p) {
  const double beta = p.beta();
  const double far = 50.0 + 10.0 * (p.lambda + beta + p.alpha + p.r);
  const double c1 = p.r * (p.r - 1.0) / 2.0 -
                    (p.alpha + p.r) * (2.0 * beta + p.alpha + p.r - 1.0) / 2.0;
  const auto tail_power = [](double yd, double s) {
    return std::pow(yd + 0.5, 1.0 - s) / (s - 1.0);
  };
  double term = std::exp(bnbar::bnb_log_pmf(0, p));
  PmfSums s;
  long long y = 0;
  for (;;) {
    const double yd = static_cast<double>(y);
    s.mass += term;
    s.mean += yd * term;
    s.second += yd * yd * term;
    if (yd > far && (term < 1e-280 || std::fabs(c1) / yd < 0.01)) {
      const double amp = term * std::pow(yd, p.alpha + 1.0) / (1.0 + c1 / yd);
      const double mass_tail =
          amp * (tail_power(yd, p.alpha + 1.0) + c1 * tail_power(yd, p.alpha + 2.0));
      const double mean_tail =
          amp * (tail_power(yd, p.alpha) + c1 * tail_power(yd, p.alpha + 1.0));
      const double second_tail =
          p.alpha > 2.0
              ? amp * (tail_power(yd, p.alpha - 1.0) + c1 * tail_power(yd, p.alpha))
              : 0.0;
      const bool second_ok =
          p.alpha <= 2.0 || second_tail < 5e-3 * std::max(s.second, 1e-300);
      if (mass_tail < 1e-9 && mean_tail < 5e-3 * std::max(s.mean, 1e-300) &&
          second_ok) {
        s.mass += mass_tail;
        s.mean += mean_tail;
        s.second += second_tail;
        s.y_stop = y;
        return s;
      }
    }
    if (y >= 50000000)
      throw std::runtime_error("pmf summation oracle exceeded its iteration cap");
    term *= bnbar::bnb_pmf_ratio(y, p);
    ++y;
  }
}

// E[score] by direct summation; the score is bounded so a plain mass
// cutoff is enough
inline double sum_bnb_score_expectation(const bnbar::BnbParams& p) {
  double term = std::exp(bnbar::bnb_log_pmf(0, p));
  double acc = 0.0, mass = 0.0;
  long long y = 0;
  const double bound = p.alpha + p.r + 2.0;
  for (;;) {
    acc += term * bnbar::bnb_score_loglambda(y, p);
    mass += term;
    const double yd = static_cast<double>(y);
    if (yd > 50.0 + 5.0 * (p.lambda + p.beta() + p.alpha + p.r) &&
        term * yd / p.alpha * bound < 1e-9)
      return acc;
    if (y >= 50000000)
      throw std::runtime_error("score expectation oracle exceeded its iteration cap");
    term *= bnbar::bnb_pmf_ratio(y, p);
    ++y;
  }
}

// total variation distance between an empirical sample and the model pmf
inline double tv_distance(const std::vector<long long>& draws,
                          const bnbar::BnbParams& p) {
  long long ymax = 0;
  for (long long d : draws) ymax = std::max(ymax, d);
  std::vector<double> hist(static_cast<std::size_t>(ymax) + 1, 0.0);
  for (long long d : draws) hist[static_cast<std::size_t>(d)] += 1.0;
  const double n = static_cast<double>(draws.size());
  double tv = 0.0;
  double covered = 0.0;
  double term = std::exp(bnbar::bnb_log_pmf(0, p));
  for (long long y = 0; y <= ymax; ++y) {
    tv += std::fabs(hist[static_cast<std::size_t>(y)] / n - term);
    covered += term;
    term *= bnbar::bnb_pmf_ratio(y, p);
  }
  return 0.5 * (tv + std::max(0.0, 1.0 - covered));
}

inline double sample_mean(const std::vector<long long>& xs) {
  double s = 0.0;
  for (long long x : xs) s += static_cast<double>(x);
  return s / static_cast<double>(xs.size());
}

}  // namespace testsup
