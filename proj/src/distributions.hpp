#pragma once

#include <vector>

#include "rng.hpp"

namespace bnbar {

// Beta negative binomial in mean parameterization. lambda is the
// conditional mean (defined for alpha > 1), r the dispersion of the
// underlying negative binomial, alpha the tail index of the beta mixing
// density: moments of order m exist iff alpha > m. The mixing beta's
// second shape is beta() = gamma() * lambda.
struct BnbParams {
  double lambda = 1.0;
  double r = 1.0;
  double alpha = 2.0;

  double gamma() const { return (alpha - 1.0) / r; }
  double beta() const { return gamma() * lambda; }

  // throws input_error when any parameter is outside its domain
  void validate() const;
};

struct BnbMoments {
  double mean;
  double second_moment;
  double variance;
};

// quantile and cdf walks give up past this support point
inline constexpr long long kTailCapY = 10000000;
// and past this much accumulated mass
inline constexpr double kTailCapMass = 1.0 - 1e-12;

double bnb_log_pmf(long long y, const BnbParams& p);

// pmf(y+1) / pmf(y) in closed form, the O(1) step the tail walks use
double bnb_pmf_ratio(long long y, const BnbParams& p);

// P(Y <= y); y < 0 is rejected
double bnb_cdf(long long y, const BnbParams& p);

// smallest y with cdf(y) >= u, for u in [0, 1); throws truncation_error
// when the walk hits the tail cap first
long long bnb_quantile(double u, const BnbParams& p);

// beta-gamma-Poisson compound draw
long long bnb_sample(const BnbParams& p, RngStream& rng);

// inverse cdf transform of a given uniform; slower than bnb_sample but
// monotone in lambda for fixed u, which makes it the reference for
// stochastic ordering checks
long long bnb_sample_inverse_cdf(const BnbParams& p, double u);

// throws refusal_error when alpha <= 2 (second moment undefined)
BnbMoments bnb_moments(const BnbParams& p);

// d log pmf / d log lambda. Bounded: -(r + alpha + 1) <= score <= alpha + 1.
double bnb_score_loglambda(long long y, const BnbParams& p);

// negative binomial with mean lambda and dispersion r,
// variance lambda + lambda^2 / r
double nb_log_pmf(long long y, double lambda, double r);
double nb_score_loglambda(long long y, double lambda, double r);
long long nb_sample(double lambda, double r, RngStream& rng);

// Log pmf evaluators with the parameter-constant gamma terms hoisted out
// and a growing table of the y-only terms. One instance per likelihood
// sweep keeps the recursion at four log_gamma calls per observation.
class BnbLogPmfEval {
 public:
  BnbLogPmfEval(double r, double alpha);
  double operator()(long long y, double lambda);

 private:
  double r_, alpha_, gamma_;
  double const_term_;              // lgamma(alpha+r) - lgamma(alpha) - lgamma(r)
  std::vector<double> y_table_;    // lgamma(y+r) - lgamma(y+1)
};

class NbLogPmfEval {
 public:
  NbLogPmfEval(double r);
  double operator()(long long y, double lambda);

 private:
  double r_;
  double lgamma_r_;
  std::vector<double> y_table_;
};

}  // namespace bnbar
