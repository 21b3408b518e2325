#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dynamics.hpp"

namespace bnbar {

enum class Family { bnb_ingarch, bnb_gas, nb_ingarch, nb_gas };

Family family_from_string(const std::string& s);
std::string family_to_string(Family f);
bool family_is_bnb(Family f);
bool family_is_gas(Family f);

// parameter names in the fixed reporting order; alpha is omitted for nb
std::vector<std::string> family_param_names(Family f);

// ModelSpec for a natural-scale parameter vector in that order
ModelSpec spec_from_kappa(Family f, const std::vector<double>& kappa);

struct FilterOutput {
  std::vector<double> lambda_hat;  // prediction for y[t], same length as y
  std::vector<double> loglik_terms;
  double loglik = 0.0;
  long long clamp_hits = 0;
};

// One step ahead intensity recursion at fixed parameters. lambda_init <= 0
// selects the default start, the sample mean of y (floored at 0.01 so an
// all zero series still filters). Throws filter_error when a likelihood
// term goes non-finite.
FilterOutput filter(const ModelSpec& m, const std::vector<long long>& y,
                    double lambda_init = 0.0);

struct FitOptions {
  int restarts = 3;          // jittered restarts after the heuristic start
  double tol = 1e-9;         // likelihood improvement per optimizer cycle
  long long max_iter = 4000; // per optimizer run
  std::uint64_t jitter_seed = 0x5eedb0b5ull;  // fixed sub-stream for restarts
  bool compute_se = true;
};

struct FitResult {
  Family family = Family::bnb_ingarch;
  std::size_t T = 0;
  std::vector<std::string> param_names;
  std::vector<double> kappa_hat;  // natural scale, fixed order
  std::vector<double> se;         // empty when unavailable
  bool se_available = false;
  double loglik = 0.0;
  double aic = 0.0;
  double delta_hat = 0.0;  // implied long run level
  double lambda_init = 0.0;
  bool converged = false;
  int n_restarts = 0;
  long long n_fn_evals = 0;
  long long clamp_hits = 0;
  // minus the average per observation hessian of the log likelihood at
  // kappa_hat; empty when the curvature evaluation failed
  std::vector<std::vector<double>> fisher;
  std::vector<double> lambda_hat;
  std::vector<std::string> warnings;
};

// Maximum likelihood over an unconstrained reparameterization:
// r = exp(a), alpha = 1 + exp(b); ingarch uses omega = exp(c) and
// (phi, tau) = (s*v, s*(1-v)) with s, v sigmoids so phi + tau < 1 by
// construction; gas uses omega = c, phi = sigmoid(d), tau = exp(e).
// Optimization is Nelder-Mead from a moment-matched start plus
// deterministic jittered restarts, so fits are reproducible bit for bit.
FitResult fit(Family family, const std::vector<long long>& y,
              const FitOptions& opts = {});

// minimum observations accepted by fit
inline constexpr std::size_t kMinFitLength = 20;

std::string fit_to_json(const FitResult& f);

struct CompareRow {
  Family family;
  std::size_t k = 0;  // parameter count
  double loglik = 0.0;
  double aic = 0.0;
  double delta_aic = 0.0;
  bool converged = false;
};

// ranks fits of one series by aic, ties broken by fewer parameters;
// refuses fits whose sample sizes differ
std::vector<CompareRow> compare(const std::vector<FitResult>& fits);
std::string compare_to_json(const std::vector<CompareRow>& rows);

}  // namespace bnbar
