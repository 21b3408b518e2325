#pragma once

#include <string>

#include "distributions.hpp"

namespace bnbar {

enum class Dist { bnb, nb };
enum class Dyn { ingarch, gas };

// linear intensity recursion lambda' = omega + phi * lambda + tau * y
struct IngarchParams {
  double omega = 1.0;  // > 0
  double phi = 0.0;    // >= 0
  double tau = 0.1;    // > 0
  void validate() const;
};

// log intensity recursion log lambda' = omega + phi * log lambda + tau * score
struct GasParams {
  double omega = 0.0;  // unrestricted
  double phi = 0.5;    // in [0, 1)
  double tau = 0.1;    // > 0
  void validate() const;
};

// one fully specified model: observation family plus intensity dynamics
struct ModelSpec {
  Dist dist = Dist::bnb;
  Dyn dyn = Dyn::ingarch;
  double r = 1.0;
  double alpha = 5.0;  // unused for nb
  double omega = 1.0;
  double phi = 0.5;
  double tau = 0.1;

  void validate() const;

  // implied long run level: omega/(1-phi-tau) for ingarch,
  // exp(omega/(1-phi)) for gas. Throws refusal_error for ingarch when
  // phi + tau >= 1.
  double delta() const;

  std::string family_name() const;  // "bnb-ingarch", "nb-gas", ...
  static ModelSpec from_family(const std::string& family, double r, double alpha,
                               double omega, double phi, double tau);
};

double ingarch_update(long long y, double lambda, const IngarchParams& p);

// clamp window for the gas log intensity; hits are surfaced as diagnostics
inline constexpr double kGasLogLambdaMin = -50.0;
inline constexpr double kGasLogLambdaMax = 50.0;

// score of the observation log density with respect to log lambda
double conditional_score(Dist dist, long long y, double lambda, double r,
                         double alpha);

// next intensity under gas dynamics; *clamped reports whether the log
// intensity window was hit
double gas_update(long long y, double lambda, const GasParams& p, Dist dist,
                  double r, double alpha, bool* clamped = nullptr);

struct StationarityReport {
  bool holds = false;
  // value of the sufficient condition, which must be below 1; NaN when no
  // criterion applies
  double value = 0.0;
  std::string reason;
};

// ingarch: phi + tau < 1. bnb-gas: the contraction bound built from the
// score range and its lipschitz constant. nb-gas: no sufficient
// condition is available because the nb score is unbounded in y.
StationarityReport check_strict_stationarity(const ModelSpec& m);

// second order condition; ingarch only, and the bnb variant needs
// alpha > 2 for the conditional variance to exist
StationarityReport check_weak_stationarity(const ModelSpec& m);

}  // namespace bnbar
