#pragma once

namespace bnbar {

// log Gamma(x) for x > 0. Lanczos approximation, roughly 1e-13 relative
// accuracy over the whole positive axis. NaN for x <= 0.
double log_gamma(double x);

// digamma psi(x) = d/dx log Gamma(x) for x > 0, about 1e-12 absolute
// accuracy. Upward recurrence to x >= 6, then the asymptotic series.
double digamma(double x);

// log Beta(a, b) for a, b > 0
double log_beta(double a, double b);

}  // namespace bnbar
