#include "dynamics.hpp"

#include <cmath>
#include <limits>

#include "errors.hpp"

namespace bnbar {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

void IngarchParams::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw input_error("ingarch omega must be positive and finite");
  if (!(phi >= 0.0) || !std::isfinite(phi))
    throw input_error("ingarch phi must be nonnegative and finite");
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw input_error("ingarch tau must be positive and finite");
}

void GasParams::validate() const {
  if (!std::isfinite(omega)) throw input_error("gas omega must be finite");
  if (!(phi >= 0.0) || !(phi < 1.0))
    throw input_error("gas phi must lie in [0, 1)");
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw input_error("gas tau must be positive and finite");
}

void ModelSpec::validate() const {
  if (!(r > 0.0) || !std::isfinite(r))
    throw input_error("r must be positive and finite");
  if (dist == Dist::bnb && (!(alpha > 1.0) || !std::isfinite(alpha)))
    throw input_error("alpha must exceed 1");
  if (dyn == Dyn::ingarch) {
    IngarchParams{omega, phi, tau}.validate();
  } else {
    GasParams{omega, phi, tau}.validate();
  }
}

double ModelSpec::delta() const {
  validate();
  if (dyn == Dyn::ingarch) {
    const double d = 1.0 - phi - tau;
    if (!(d > 0.0))
      throw refusal_error("long run level undefined: phi + tau >= 1");
    return omega / d;
  }
  return std::exp(omega / (1.0 - phi));
}

std::string ModelSpec::family_name() const {
  std::string s = dist == Dist::bnb ? "bnb" : "nb";
  s += dyn == Dyn::ingarch ? "-ingarch" : "-gas";
  return s;
}

ModelSpec ModelSpec::from_family(const std::string& family, double r, double alpha,
                                 double omega, double phi, double tau) {
  ModelSpec m;
  if (family == "bnb-ingarch") {
    m.dist = Dist::bnb;
    m.dyn = Dyn::ingarch;
  } else if (family == "bnb-gas") {
    m.dist = Dist::bnb;
    m.dyn = Dyn::gas;
  } else if (family == "nb-ingarch") {
    m.dist = Dist::nb;
    m.dyn = Dyn::ingarch;
  } else if (family == "nb-gas") {
    m.dist = Dist::nb;
    m.dyn = Dyn::gas;
  } else {
    throw input_error("unknown family '" + family +
                      "' (expected bnb-ingarch, bnb-gas, nb-ingarch or nb-gas)");
  }
  m.r = r;
  m.alpha = alpha;
  m.omega = omega;
  m.phi = phi;
  m.tau = tau;
  m.validate();
  return m;
}

double ingarch_update(long long y, double lambda, const IngarchParams& p) {
  p.validate();
  if (y < 0) throw input_error("count must be nonnegative");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw input_error("lambda must be positive and finite");
  return p.omega + p.phi * lambda + p.tau * static_cast<double>(y);
}

double conditional_score(Dist dist, long long y, double lambda, double r,
                         double alpha) {
  if (dist == Dist::bnb) return bnb_score_loglambda(y, BnbParams{lambda, r, alpha});
  return nb_score_loglambda(y, lambda, r);
}

double gas_update(long long y, double lambda, const GasParams& p, Dist dist,
                  double r, double alpha, bool* clamped) {
  p.validate();
  const double s = conditional_score(dist, y, lambda, r, alpha);
  double ll = p.omega + p.phi * std::log(lambda) + p.tau * s;
  bool hit = false;
  if (ll > kGasLogLambdaMax) {
    ll = kGasLogLambdaMax;
    hit = true;
  } else if (ll < kGasLogLambdaMin) {
    ll = kGasLogLambdaMin;
    hit = true;
  }
  if (clamped) *clamped = hit;
  return std::exp(ll);
}

StationarityReport check_strict_stationarity(const ModelSpec& m) {
  m.validate();
  StationarityReport rep;
  if (m.dyn == Dyn::ingarch) {
    rep.value = m.phi + m.tau;
    rep.holds = rep.value < 1.0;
    if (!rep.holds) rep.reason = "tau + phi >= 1";
    return rep;
  }
  if (m.dist == Dist::nb) {
    rep.holds = false;
    rep.value = kNaN;
    rep.reason =
        "no sufficient condition available for nb-gas: the nb score is "
        "unbounded in y";
    return rep;
  }
  // contraction bound for the bnb score recursion: the score lies in
  // [-(alpha+r+1), alpha+1] and its lambda-derivative admits the
  // gamma-based lipschitz constant below, giving the sufficient condition
  // (tau * (gamma*(3*alpha+2*r+3) + alpha+r+1)/gamma + phi)
  //   * exp(tau*(2*alpha+r+2)) < 1
  const double g = (m.alpha - 1.0) / m.r;
  rep.value = (m.tau * (g * (3.0 * m.alpha + 2.0 * m.r + 3.0) + m.alpha + m.r + 1.0) / g +
               m.phi) *
              std::exp(m.tau * (2.0 * m.alpha + m.r + 2.0));
  rep.holds = rep.value < 1.0;
  if (!rep.holds) rep.reason = "gas contraction bound is not below 1";
  return rep;
}

StationarityReport check_weak_stationarity(const ModelSpec& m) {
  m.validate();
  StationarityReport rep;
  if (m.dyn == Dyn::gas) {
    rep.holds = false;
    rep.value = kNaN;
    rep.reason = "no weak stationarity criterion implemented for gas dynamics";
    return rep;
  }
  if (m.dist == Dist::bnb && !(m.alpha > 2.0)) {
    rep.holds = false;
    rep.value = kNaN;
    rep.reason = "alpha <= 2: conditional variance undefined";
    return rep;
  }
  // variance ratio coefficient E(y^2 | lambda) / lambda^2 as lambda grows
  const double c = m.dist == Dist::bnb
                       ? (m.r + 1.0) * (m.alpha - 1.0) / (m.r * (m.alpha - 2.0))
                       : 1.0 + 1.0 / m.r;
  rep.value = c * m.tau * m.tau + m.phi * m.phi + 2.0 * m.phi * m.tau;
  rep.holds = rep.value < 1.0;
  if (!rep.holds) rep.reason = "second order condition is not below 1";
  return rep;
}

}  // namespace bnbar
