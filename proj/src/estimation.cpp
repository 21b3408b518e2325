#include "estimation.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "errors.hpp"
#include "nelder_mead.hpp"
#include "rng.hpp"

namespace bnbar {

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(double p) { return std::log(p / (1.0 - p)); }

std::size_t family_dim(Family f) { return family_is_bnb(f) ? 5 : 4; }

// natural parameters <-> unconstrained optimizer coordinates
std::vector<double> unpack(Family f, const std::vector<double>& z) {
  std::vector<double> kappa;
  const double r = std::exp(z[0]);
  const bool bnb = family_is_bnb(f);
  const double alpha = bnb ? 1.0 + std::exp(z[1]) : 0.0;
  const std::size_t c = bnb ? 2 : 1;
  double omega, phi, tau;
  if (family_is_gas(f)) {
    omega = z[c];
    phi = sigmoid(z[c + 1]);
    tau = std::exp(z[c + 2]);
  } else {
    omega = std::exp(z[c]);
    const double s = sigmoid(z[c + 1]);
    const double v = sigmoid(z[c + 2]);
    phi = s * v;
    tau = s * (1.0 - v);
  }
  if (bnb) {
    kappa = {r, alpha, omega, phi, tau};
  } else {
    kappa = {r, omega, phi, tau};
  }
  return kappa;
}

std::vector<double> pack(Family f, const std::vector<double>& kappa) {
  const bool bnb = family_is_bnb(f);
  std::vector<double> z;
  z.push_back(std::log(kappa[0]));
  std::size_t i = 1;
  if (bnb) z.push_back(std::log(kappa[i++] - 1.0));
  const double omega = kappa[i], phi = kappa[i + 1], tau = kappa[i + 2];
  if (family_is_gas(f)) {
    z.push_back(omega);
    z.push_back(logit(phi));
    z.push_back(std::log(tau));
  } else {
    z.push_back(std::log(omega));
    const double s = phi + tau;
    z.push_back(logit(s));
    z.push_back(logit(phi / s));
  }
  return z;
}

struct StartStats {
  double mean, var;
};

StartStats series_stats(const std::vector<long long>& y) {
  double m = 0.0;
  for (long long v : y) m += static_cast<double>(v);
  m /= static_cast<double>(y.size());
  double s2 = 0.0;
  for (long long v : y) {
    const double d = static_cast<double>(v) - m;
    s2 += d * d;
  }
  s2 /= static_cast<double>(y.size());
  return {m, s2};
}

std::vector<double> start_kappa(Family f, const StartStats& st) {
  const double delta0 = std::max(st.mean, 0.01);
  const double phi0 = 0.5, tau0 = 0.2;
  // method of moments dispersion from the marginal nb approximation
  double r0 = 50.0;
  if (st.var > 1.05 * st.mean && st.mean > 0.0)
    r0 = st.mean * st.mean / (st.var - st.mean);
  r0 = std::clamp(r0, 0.1, 100.0);
  const double alpha0 = 5.0;
  const double omega0 = family_is_gas(f) ? (1.0 - phi0) * std::log(delta0)
                                         : delta0 * (1.0 - phi0 - tau0);
  if (family_is_bnb(f)) return {r0, alpha0, omega0, phi0, tau0};
  return {r0, omega0, phi0, tau0};
}

double mean_loglik(Family f, const std::vector<double>& kappa,
                   const std::vector<long long>& y) {
  const ModelSpec m = spec_from_kappa(f, kappa);
  const FilterOutput out = filter(m, y);
  return out.loglik / static_cast<double>(y.size());
}

// Gauss-Jordan inverse with partial pivoting; false when singular
bool invert(std::vector<std::vector<double>> a, std::vector<std::vector<double>>& inv) {
  const std::size_t n = a.size();
  inv.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t rw = col + 1; rw < n; ++rw) {
      if (std::fabs(a[rw][col]) > std::fabs(a[piv][col])) piv = rw;
    }
    if (std::fabs(a[piv][col]) < 1e-300) return false;
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const double d = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= d;
      inv[col][j] /= d;
    }
    for (std::size_t rw = 0; rw < n; ++rw) {
      if (rw == col) continue;
      const double factor = a[rw][col];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a[rw][j] -= factor * a[col][j];
        inv[rw][j] -= factor * inv[col][j];
      }
    }
  }
  return true;
}

// distance from kappa[i] to its lower domain boundary, +inf when free
double boundary_gap(Family f, std::size_t i, const std::vector<double>& kappa) {
  const bool bnb = family_is_bnb(f);
  const std::size_t omega_idx = bnb ? 2 : 1;
  if (i == 0) return kappa[0];                       // r > 0
  if (bnb && i == 1) return kappa[1] - 1.0;          // alpha > 1
  if (i == omega_idx)
    return family_is_gas(f) ? 1e300 : kappa[i];      // omega > 0 for ingarch
  if (i == omega_idx + 1) return kappa[i];           // phi >= 0
  return kappa[i];                                   // tau > 0
}

}  // namespace

Family family_from_string(const std::string& s) {
  if (s == "bnb-ingarch") return Family::bnb_ingarch;
  if (s == "bnb-gas") return Family::bnb_gas;
  if (s == "nb-ingarch") return Family::nb_ingarch;
  if (s == "nb-gas") return Family::nb_gas;
  throw input_error("unknown family '" + s +
                    "' (expected bnb-ingarch, bnb-gas, nb-ingarch or nb-gas)");
}

std::string family_to_string(Family f) {
  switch (f) {
    case Family::bnb_ingarch: return "bnb-ingarch";
    case Family::bnb_gas: return "bnb-gas";
    case Family::nb_ingarch: return "nb-ingarch";
    case Family::nb_gas: return "nb-gas";
  }
  throw input_error("bad family enum");
}

bool family_is_bnb(Family f) {
  return f == Family::bnb_ingarch || f == Family::bnb_gas;
}

bool family_is_gas(Family f) {
  return f == Family::bnb_gas || f == Family::nb_gas;
}

std::vector<std::string> family_param_names(Family f) {
  if (family_is_bnb(f)) return {"r", "alpha", "omega", "phi", "tau"};
  return {"r", "omega", "phi", "tau"};
}

ModelSpec spec_from_kappa(Family f, const std::vector<double>& kappa) {
  if (kappa.size() != family_dim(f))
    throw input_error("parameter vector has wrong length for " +
                      family_to_string(f));
  const bool bnb = family_is_bnb(f);
  const std::size_t c = bnb ? 2 : 1;
  return ModelSpec::from_family(family_to_string(f), kappa[0],
                                bnb ? kappa[1] : 5.0, kappa[c], kappa[c + 1],
                                kappa[c + 2]);
}

FilterOutput filter(const ModelSpec& m, const std::vector<long long>& y,
                    double lambda_init) {
  m.validate();
  if (y.empty()) throw input_error("series is empty");
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (y[t] < 0)
      throw input_error("negative count at position " + std::to_string(t));
  }
  double lambda = lambda_init;
  if (!(lambda > 0.0)) {
    double mean = 0.0;
    for (long long v : y) mean += static_cast<double>(v);
    lambda = std::max(mean / static_cast<double>(y.size()), 0.01);
  }

  FilterOutput out;
  out.lambda_hat.reserve(y.size());
  out.loglik_terms.reserve(y.size());
  const IngarchParams ing{m.omega, m.phi, m.tau};
  const GasParams gas{m.omega, m.phi, m.tau};
  BnbLogPmfEval bnb_eval(m.r, m.dist == Dist::bnb ? m.alpha : 5.0);
  NbLogPmfEval nb_eval(m.r);
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double ll = m.dist == Dist::bnb ? bnb_eval(y[t], lambda)
                                          : nb_eval(y[t], lambda);
    // a log pmf above zero can only come from catastrophic cancellation
    // in the gamma function differences at extreme parameters
    if (!std::isfinite(ll) || ll > 1e-3)
      throw filter_error(t, "numerically invalid likelihood term at t = " +
                                std::to_string(t));
    out.lambda_hat.push_back(lambda);
    out.loglik_terms.push_back(ll);
    out.loglik += ll;
    if (m.dyn == Dyn::ingarch) {
      lambda = ingarch_update(y[t], lambda, ing);
    } else {
      bool clamped = false;
      lambda = gas_update(y[t], lambda, gas, m.dist, m.r, m.alpha, &clamped);
      out.clamp_hits += clamped;
    }
  }
  return out;
}

FitResult fit(Family family, const std::vector<long long>& y,
              const FitOptions& opts) {
  if (y.size() < kMinFitLength)
    throw input_error("series too short: need at least " +
                      std::to_string(kMinFitLength) + " observations, got " +
                      std::to_string(y.size()));
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (y[t] < 0)
      throw input_error("negative count at position " + std::to_string(t));
  }

  const double T = static_cast<double>(y.size());
  // Soft wall keeping the optimizer out of the numerically degenerate
  // far field (r or alpha beyond ~e^12, saturated sigmoids), where the
  // likelihood surface is rounding noise. Quadratic, so the objective
  // stays smooth at the wall.
  const auto bound_penalty = [](const std::vector<double>& z) {
    double p = 0.0;
    for (double v : z) {
      const double excess = std::fabs(v) - 12.0;
      if (excess > 0.0) p += excess * excess;
    }
    return p;
  };
  const auto objective = [&](const std::vector<double>& z) {
    try {
      return -mean_loglik(family, unpack(family, z), y) + bound_penalty(z);
    } catch (const error&) {
      return 1e10;
    }
  };

  const auto st = series_stats(y);
  const std::vector<double> z0 = pack(family, start_kappa(family, st));

  FitResult res;
  res.family = family;
  res.T = y.size();
  res.param_names = family_param_names(family);

  NmResult best = nelder_mead(objective, z0, 0.25, opts.tol, opts.max_iter);
  res.n_fn_evals = best.n_eval;
  for (int j = 1; j <= opts.restarts; ++j) {
    RngStream jit = RngStream::derive(opts.jitter_seed, static_cast<std::uint64_t>(j), 0);
    std::vector<double> zj = best.x;
    for (double& v : zj) v += 0.25 * jit.normal();
    NmResult run = nelder_mead(objective, zj, 0.25, opts.tol, opts.max_iter);
    res.n_fn_evals += run.n_eval;
    if (run.fmin < best.fmin) best = run;
  }
  res.converged = best.converged;
  res.n_restarts = opts.restarts;
  res.kappa_hat = unpack(family, best.x);

  const ModelSpec m = spec_from_kappa(family, res.kappa_hat);
  const FilterOutput out = filter(m, y);
  res.loglik = out.loglik;
  res.clamp_hits = out.clamp_hits;
  res.lambda_hat = out.lambda_hat;
  res.lambda_init = out.lambda_hat.front();
  res.aic = 2.0 * static_cast<double>(res.param_names.size()) - 2.0 * res.loglik;
  res.delta_hat = family_is_gas(family)
                      ? std::exp(m.omega / (1.0 - m.phi))
                      : m.omega / (1.0 - m.phi - m.tau);

  if (family_is_bnb(family) && res.kappa_hat[1] <= 2.0)
    res.warnings.push_back(
        "alpha_hat <= 2: conditional variance undefined, normal theory "
        "standard errors unsupported");
  if (res.clamp_hits > 0)
    res.warnings.push_back("gas filter clamped the log intensity " +
                           std::to_string(res.clamp_hits) + " times");

  if (opts.compute_se) {
    // observed information via central differences on the natural scale
    const std::size_t k = res.kappa_hat.size();
    std::vector<double> h(k);
    bool h_ok = true;
    for (std::size_t i = 0; i < k; ++i) {
      h[i] = std::min(1e-4 * std::max(1.0, std::fabs(res.kappa_hat[i])),
                      0.4 * boundary_gap(family, i, res.kappa_hat));
      if (!(h[i] > 1e-8)) h_ok = false;
    }
    auto shifted = [&](std::vector<double> kap, std::size_t i, double step) {
      kap[i] += step;
      return mean_loglik(family, kap, y);
    };
    std::vector<std::vector<double>> fisher(k, std::vector<double>(k, 0.0));
    bool ok = h_ok;
    if (ok) {
      try {
        const double f0 = out.loglik / T;
        for (std::size_t i = 0; i < k; ++i) {
          const double fp = shifted(res.kappa_hat, i, h[i]);
          const double fm = shifted(res.kappa_hat, i, -h[i]);
          fisher[i][i] = -(fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        }
        for (std::size_t i = 0; i < k; ++i) {
          for (std::size_t j = i + 1; j < k; ++j) {
            auto shifted2 = [&](double si, double sj) {
              std::vector<double> kap = res.kappa_hat;
              kap[i] += si;
              kap[j] += sj;
              return mean_loglik(family, kap, y);
            };
            const double v = -(shifted2(h[i], h[j]) - shifted2(h[i], -h[j]) -
                               shifted2(-h[i], h[j]) + shifted2(-h[i], -h[j])) /
                             (4.0 * h[i] * h[j]);
            fisher[i][j] = fisher[j][i] = v;
          }
        }
      } catch (const error&) {
        ok = false;
      }
    }
    std::vector<std::vector<double>> cov;
    if (ok) ok = invert(fisher, cov);
    if (ok) {
      for (std::size_t i = 0; i < k; ++i) {
        if (!(cov[i][i] > 0.0)) ok = false;
      }
    }
    if (ok) {
      res.fisher = fisher;
      res.se.resize(k);
      for (std::size_t i = 0; i < k; ++i) res.se[i] = std::sqrt(cov[i][i] / T);
      res.se_available = true;
    } else {
      res.warnings.push_back(
          "standard errors unavailable: observed information is singular or "
          "not positive definite at the optimum");
    }
  }
  return res;
}

std::string fit_to_json(const FitResult& f) {
  nlohmann::json j;
  j["family"] = family_to_string(f.family);
  j["T"] = f.T;
  nlohmann::json kappa, se;
  for (std::size_t i = 0; i < f.param_names.size(); ++i) {
    kappa[f.param_names[i]] = f.kappa_hat[i];
    if (f.se_available) se[f.param_names[i]] = f.se[i];
  }
  j["kappa_hat"] = kappa;
  j["se"] = f.se_available ? se : nlohmann::json(nullptr);
  j["se_available"] = f.se_available;
  j["loglik"] = f.loglik;
  j["aic"] = f.aic;
  j["delta"] = f.delta_hat;
  j["inv_r"] = 1.0 / f.kappa_hat[0];
  if (family_is_bnb(f.family)) j["inv_alpha"] = 1.0 / f.kappa_hat[1];
  j["lambda_init"] = f.lambda_init;
  j["diagnostics"] = {{"converged", f.converged},
                      {"n_restarts", f.n_restarts},
                      {"n_fn_evals", f.n_fn_evals},
                      {"clamp_hits", f.clamp_hits},
                      {"warnings", f.warnings}};
  j["fisher"] = f.fisher.empty() ? nlohmann::json(nullptr)
                                 : nlohmann::json(f.fisher);
  return j.dump(2);
}

std::vector<CompareRow> compare(const std::vector<FitResult>& fits) {
  if (fits.empty()) throw input_error("nothing to compare");
  for (const auto& f : fits) {
    if (f.T != fits.front().T)
      throw input_error("cannot compare fits of different sample sizes");
  }
  std::vector<CompareRow> rows;
  for (const auto& f : fits) {
    rows.push_back({f.family, f.param_names.size(), f.loglik, f.aic, 0.0,
                    f.converged});
  }
  std::sort(rows.begin(), rows.end(), [](const CompareRow& a, const CompareRow& b) {
    if (a.aic != b.aic) return a.aic < b.aic;
    if (a.k != b.k) return a.k < b.k;
    return family_to_string(a.family) < family_to_string(b.family);
  });
  for (auto& row : rows) row.delta_aic = row.aic - rows.front().aic;
  return rows;
}

std::string compare_to_json(const std::vector<CompareRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"family", family_to_string(r.family)},
                   {"k", r.k},
                   {"loglik", r.loglik},
                   {"aic", r.aic},
                   {"delta_aic", r.delta_aic},
                   {"converged", r.converged}});
  }
  return arr.dump(2);
}

}  // namespace bnbar
