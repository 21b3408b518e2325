#include "distributions.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"
#include "special.hpp"

namespace bnbar {

namespace {

void require_count(long long y) {
  if (y < 0) throw input_error("count must be nonnegative, got " + std::to_string(y));
}

void require_nb(double lambda, double r) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw input_error("lambda must be positive and finite");
  if (!(r > 0.0) || !std::isfinite(r))
    throw input_error("r must be positive and finite");
}

}  // namespace

void BnbParams::validate() const {
  require_nb(lambda, r);
  if (!(alpha > 1.0) || !std::isfinite(alpha))
    throw input_error("alpha must exceed 1 for the mean to exist");
}

double bnb_log_pmf(long long y, const BnbParams& p) {
  p.validate();
  require_count(y);
  const double b = p.beta();
  const double yd = static_cast<double>(y);
  return log_gamma(yd + p.r) - log_gamma(yd + 1.0) - log_gamma(p.r) +
         log_gamma(p.alpha + p.r) + log_gamma(b + yd) -
         log_gamma(p.alpha + p.r + b + yd) - log_gamma(p.alpha) - log_gamma(b) +
         log_gamma(p.alpha + b);
}

double bnb_pmf_ratio(long long y, const BnbParams& p) {
  p.validate();
  require_count(y);
  const double b = p.beta();
  const double yd = static_cast<double>(y);
  return (yd + p.r) * (b + yd) / ((yd + 1.0) * (p.alpha + b + p.r + yd));
}

double bnb_cdf(long long y, const BnbParams& p) {
  p.validate();
  require_count(y);
  double term = std::exp(bnb_log_pmf(0, p));
  double cum = term;
  for (long long k = 0; k < y; ++k) {
    if (cum >= kTailCapMass) return std::min(cum, 1.0);
    term *= bnb_pmf_ratio(k, p);
    cum += term;
  }
  return std::min(cum, 1.0);
}

long long bnb_quantile(double u, const BnbParams& p) {
  p.validate();
  if (!(u >= 0.0) || !(u < 1.0) || !std::isfinite(u))
    throw input_error("quantile level must lie in [0, 1)");
  double term = std::exp(bnb_log_pmf(0, p));
  double cum = term;
  long long y = 0;
  while (cum < u) {
    if (cum >= kTailCapMass || y >= kTailCapY)
      throw truncation_error(y, cum,
                             "quantile walk reached the tail cap at y = " +
                                 std::to_string(y) + " with mass " +
                                 std::to_string(cum));
    term *= bnb_pmf_ratio(y, p);
    cum += term;
    ++y;
  }
  return y;
}

long long bnb_sample(const BnbParams& p, RngStream& rng) {
  p.validate();
  for (;;) {
    const double prob = rng.beta(p.alpha, p.beta());
    // conditional NB(r, prob) drawn as a gamma-Poisson compound
    const double intensity = rng.gamma(p.r, (1.0 - prob) / prob);
    if (std::isfinite(intensity)) return rng.poisson(intensity);
  }
}

long long bnb_sample_inverse_cdf(const BnbParams& p, double u) {
  return bnb_quantile(u, p);
}

BnbMoments bnb_moments(const BnbParams& p) {
  p.validate();
  if (!(p.alpha > 2.0))
    throw refusal_error("second moment undefined: alpha = " +
                        std::to_string(p.alpha) + " is not above 2");
  const double second =
      (p.alpha + p.r - 1.0) / (p.alpha - 2.0) * p.lambda +
      (p.r + 1.0) * (p.alpha - 1.0) / (p.r * (p.alpha - 2.0)) * p.lambda * p.lambda;
  return {p.lambda, second, second - p.lambda * p.lambda};
}

double bnb_score_loglambda(long long y, const BnbParams& p) {
  p.validate();
  require_count(y);
  const double gl = p.beta();
  const double yd = static_cast<double>(y);
  return gl * (digamma(gl + yd) + digamma(gl + p.alpha) -
               digamma(gl + yd + p.alpha + p.r) - digamma(gl));
}

double nb_log_pmf(long long y, double lambda, double r) {
  require_nb(lambda, r);
  require_count(y);
  const double yd = static_cast<double>(y);
  return log_gamma(yd + r) - log_gamma(yd + 1.0) - log_gamma(r) +
         r * std::log(r / (r + lambda)) + yd * std::log(lambda / (r + lambda));
}

double nb_score_loglambda(long long y, double lambda, double r) {
  require_nb(lambda, r);
  require_count(y);
  return r * (static_cast<double>(y) - lambda) / (r + lambda);
}

long long nb_sample(double lambda, double r, RngStream& rng) {
  require_nb(lambda, r);
  for (;;) {
    const double intensity = rng.gamma(r, lambda / r);
    if (std::isfinite(intensity)) return rng.poisson(intensity);
  }
}

BnbLogPmfEval::BnbLogPmfEval(double r, double alpha) : r_(r), alpha_(alpha) {
  BnbParams probe{1.0, r, alpha};
  probe.validate();
  gamma_ = probe.gamma();
  const_term_ = log_gamma(alpha + r) - log_gamma(alpha) - log_gamma(r);
  y_table_.reserve(256);
  y_table_.push_back(log_gamma(r));  // y = 0 entry: lgamma(r) - lgamma(1)
}

double BnbLogPmfEval::operator()(long long y, double lambda) {
  if (y < 0) throw input_error("count must be nonnegative");
  const auto idx = static_cast<std::size_t>(y);
  while (y_table_.size() <= idx) {
    const double k = static_cast<double>(y_table_.size());
    // lgamma(k+r) - lgamma(k+1) from the previous entry
    y_table_.push_back(y_table_.back() + std::log((k - 1.0 + r_) / k));
  }
  const double b = gamma_ * lambda;
  const double yd = static_cast<double>(y);
  return y_table_[idx] + const_term_ + log_gamma(b + yd) -
         log_gamma(alpha_ + r_ + b + yd) - log_gamma(b) + log_gamma(alpha_ + b);
}

NbLogPmfEval::NbLogPmfEval(double r) : r_(r) {
  require_nb(1.0, r);
  lgamma_r_ = log_gamma(r);
  y_table_.reserve(256);
  y_table_.push_back(lgamma_r_);
}

double NbLogPmfEval::operator()(long long y, double lambda) {
  if (y < 0) throw input_error("count must be nonnegative");
  const auto idx = static_cast<std::size_t>(y);
  while (y_table_.size() <= idx) {
    const double k = static_cast<double>(y_table_.size());
    y_table_.push_back(y_table_.back() + std::log((k - 1.0 + r_) / k));
  }
  const double yd = static_cast<double>(y);
  return y_table_[idx] - lgamma_r_ + r_ * std::log(r_ / (r_ + lambda)) +
         yd * std::log(lambda / (r_ + lambda));
}

}  // namespace bnbar
