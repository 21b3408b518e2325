#include "simulation.hpp"

#include <cmath>
#include <set>
#include <string>

#include "errors.hpp"
#include "rng.hpp"

namespace bnbar {

SimulatedPath simulate(const ModelSpec& m, long long n, long long burn_in,
                       std::uint64_t seed, bool allow_nonstationary) {
  m.validate();
  if (n <= 0) throw input_error("path length must be positive");
  if (burn_in < 0) throw input_error("burn in must be nonnegative");
  const auto strict = check_strict_stationarity(m);
  if (!strict.holds && !allow_nonstationary)
    throw refusal_error("refusing to simulate: strict stationarity not "
                        "certified (" +
                        (strict.reason.empty() ? std::string("condition value "
                                                            "not below 1")
                                               : strict.reason) +
                        ")");

  double lambda;
  if (m.dyn == Dyn::ingarch) {
    lambda = m.phi + m.tau < 1.0 ? m.delta() : m.omega;
  } else {
    lambda = std::exp(std::min(std::max(m.omega / (1.0 - m.phi), kGasLogLambdaMin),
                               kGasLogLambdaMax));
  }

  SimulatedPath path;
  path.model = m;
  path.seed = seed;
  path.burn_in = burn_in;
  path.y.reserve(static_cast<std::size_t>(n));
  path.lambda.reserve(static_cast<std::size_t>(n));

  RngStream rng(seed);
  const IngarchParams ing{m.omega, m.phi, m.tau};
  const GasParams gas{m.omega, m.phi, m.tau};
  for (long long t = 0; t < burn_in + n; ++t) {
    const long long y =
        m.dist == Dist::bnb
            ? bnb_sample(BnbParams{lambda, m.r, m.alpha}, rng)
            : nb_sample(lambda, m.r, rng);
    if (t >= burn_in) {
      path.y.push_back(y);
      path.lambda.push_back(lambda);
    }
    if (m.dyn == Dyn::ingarch) {
      lambda = ingarch_update(y, lambda, ing);
    } else {
      bool clamped = false;
      lambda = gas_update(y, lambda, gas, m.dist, m.r, m.alpha, &clamped);
      path.clamp_hits += clamped;
    }
  }
  return path;
}

SimulatedPath inject_outliers(const SimulatedPath& path,
                              const std::vector<long long>& positions,
                              const std::vector<double>& magnitudes) {
  if (positions.size() != magnitudes.size())
    throw input_error("positions and magnitudes must have equal length");
  const long long n = static_cast<long long>(path.y.size());
  std::set<long long> seen;
  for (long long pos : positions) {
    if (pos < 0 || pos >= n)
      throw input_error("outlier position " + std::to_string(pos) +
                        " outside [0, " + std::to_string(n) + ")");
    if (!seen.insert(pos).second)
      throw input_error("duplicate outlier position " + std::to_string(pos));
  }
  for (double mag : magnitudes) {
    if (!(mag > 0.0) || !std::isfinite(mag))
      throw input_error("outlier magnitude must be positive and finite");
  }

  double mean = 0.0;
  for (long long y : path.y) mean += static_cast<double>(y);
  mean /= static_cast<double>(path.y.size());

  SimulatedPath out = path;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    out.y[static_cast<std::size_t>(positions[i])] =
        std::llround(magnitudes[i] * mean);
    out.outlier_positions.push_back(positions[i]);
    out.outlier_magnitudes.push_back(magnitudes[i]);
  }
  return out;
}

}  // namespace bnbar
