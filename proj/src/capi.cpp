#include "bnbar.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <json.hpp>
#include <string>
#include <vector>

#include "distributions.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "estimation.hpp"
#include "montecarlo.hpp"
#include "simulation.hpp"

struct bnbar_model {
  bnbar::ModelSpec spec;
};

struct bnbar_path {
  bnbar::SimulatedPath path;
};

struct bnbar_fit {
  bnbar::FitResult res;
};

struct bnbar_mc {
  bnbar::McReport rep;
};

namespace {

thread_local std::string g_last_error;

int fail_input(const char* msg) {
  g_last_error = msg;
  return 1;
}

template <typename F>
int wrap(F&& body) {
  try {
    body();
    return 0;
  } catch (const bnbar::error& e) {
    g_last_error = e.what();
    return static_cast<int>(e.code);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return 3;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

bnbar::FitOptions to_fit_options(const bnbar_fit_options* opts) {
  bnbar::FitOptions o;
  if (opts) {
    o.restarts = opts->restarts;
    o.tol = opts->tol;
    o.max_iter = opts->max_iter;
    o.jitter_seed = opts->jitter_seed;
    o.compute_se = opts->compute_se != 0;
  }
  return o;
}

long long nb_quantile_walk(double u, double lambda, double r) {
  if (!(u > 0.0 && u < 1.0))
    throw bnbar::input_error("quantile level must lie in (0, 1)");
  double term = std::exp(bnbar::nb_log_pmf(0, lambda, r));
  double cum = term;
  long long y = 0;
  while (cum < u) {
    if (y >= bnbar::kTailCapY)
      throw bnbar::truncation_error(y, cum,
                                    "quantile walk hit the tail cap");
    term *= (static_cast<double>(y) + r) / (static_cast<double>(y) + 1.0) *
            (lambda / (r + lambda));
    ++y;
    cum += term;
  }
  return y;
}

nlohmann::json stationarity_json(const bnbar::StationarityReport& rep) {
  return {{"holds", rep.holds}, {"value", rep.value}, {"reason", rep.reason}};
}

std::size_t index_of(const bnbar_fit* f, const char* name) {
  for (std::size_t i = 0; i < f->res.param_names.size(); ++i) {
    if (f->res.param_names[i] == name) return i;
  }
  throw bnbar::input_error("unknown parameter '" + std::string(name) +
                           "' for family " +
                           bnbar::family_to_string(f->res.family));
}

}  // namespace

extern "C" {

const char* bnbar_version(void) { return "0.1.0"; }

const char* bnbar_last_error(void) { return g_last_error.c_str(); }

void bnbar_string_free(char* s) { std::free(s); }

int bnbar_model_new(const char* family, double r, double alpha, double omega,
                    double phi, double tau, bnbar_model** out) {
  if (!family || !out) return fail_input("null pointer argument");
  return wrap([&] {
    bnbar::ModelSpec spec =
        bnbar::ModelSpec::from_family(family, r, alpha, omega, phi, tau);
    spec.validate();
    *out = new bnbar_model{spec};
  });
}

void bnbar_model_free(bnbar_model* m) { delete m; }

int bnbar_log_pmf(const bnbar_model* m, long long y, double lambda,
                  double* out) {
  if (!m || !out) return fail_input("null pointer argument");
  return wrap([&] {
    if (m->spec.dist == bnbar::Dist::bnb) {
      *out = bnbar::bnb_log_pmf(y, {lambda, m->spec.r, m->spec.alpha});
    } else {
      *out = bnbar::nb_log_pmf(y, lambda, m->spec.r);
    }
  });
}

int bnbar_quantile(const bnbar_model* m, double u, double lambda,
                   long long* out) {
  if (!m || !out) return fail_input("null pointer argument");
  return wrap([&] {
    if (m->spec.dist == bnbar::Dist::bnb) {
      *out = bnbar::bnb_quantile(u, {lambda, m->spec.r, m->spec.alpha});
    } else {
      *out = nb_quantile_walk(u, lambda, m->spec.r);
    }
  });
}

int bnbar_score(const bnbar_model* m, long long y, double lambda, double* out) {
  if (!m || !out) return fail_input("null pointer argument");
  return wrap([&] {
    *out = bnbar::conditional_score(m->spec.dist, y, lambda, m->spec.r,
                                    m->spec.alpha);
  });
}

int bnbar_check_json(const bnbar_model* m, char** out) {
  if (!m || !out) return fail_input("null pointer argument");
  return wrap([&] {
    nlohmann::json j;
    j["family"] = m->spec.family_name();
    j["strict"] = stationarity_json(bnbar::check_strict_stationarity(m->spec));
    j["weak"] = stationarity_json(bnbar::check_weak_stationarity(m->spec));
    try {
      j["delta"] = m->spec.delta();
    } catch (const bnbar::error&) {
      j["delta"] = nullptr;
    }
    *out = dup_string(j.dump(2));
  });
}

int bnbar_simulate(const bnbar_model* m, long long n, long long burn_in,
                   unsigned long long seed, int allow_nonstationary,
                   bnbar_path** out) {
  if (!m || !out) return fail_input("null pointer argument");
  return wrap([&] {
    *out = new bnbar_path{
        bnbar::simulate(m->spec, n, burn_in, seed, allow_nonstationary != 0)};
  });
}

int bnbar_path_length(const bnbar_path* p, long long* out) {
  if (!p || !out) return fail_input("null pointer argument");
  *out = static_cast<long long>(p->path.y.size());
  return 0;
}

int bnbar_path_clamp_hits(const bnbar_path* p, long long* out) {
  if (!p || !out) return fail_input("null pointer argument");
  *out = p->path.clamp_hits;
  return 0;
}

int bnbar_path_counts(const bnbar_path* p, long long* buf) {
  if (!p || !buf) return fail_input("null pointer argument");
  std::memcpy(buf, p->path.y.data(), p->path.y.size() * sizeof(long long));
  return 0;
}

int bnbar_path_intensity(const bnbar_path* p, double* buf) {
  if (!p || !buf) return fail_input("null pointer argument");
  std::memcpy(buf, p->path.lambda.data(), p->path.lambda.size() * sizeof(double));
  return 0;
}

int bnbar_inject_outliers(const bnbar_path* p, const long long* positions,
                          const double* magnitudes, long long n_outliers,
                          bnbar_path** out) {
  if (!p || !positions || !magnitudes || !out)
    return fail_input("null pointer argument");
  if (n_outliers < 0) return fail_input("n_outliers must be nonnegative");
  return wrap([&] {
    const std::vector<long long> pos(positions, positions + n_outliers);
    const std::vector<double> mag(magnitudes, magnitudes + n_outliers);
    *out = new bnbar_path{bnbar::inject_outliers(p->path, pos, mag)};
  });
}

void bnbar_path_free(bnbar_path* p) { delete p; }

int bnbar_fit_options_default(bnbar_fit_options* opts) {
  if (!opts) return fail_input("null pointer argument");
  const bnbar::FitOptions d;
  opts->restarts = d.restarts;
  opts->tol = d.tol;
  opts->max_iter = d.max_iter;
  opts->jitter_seed = d.jitter_seed;
  opts->compute_se = d.compute_se ? 1 : 0;
  return 0;
}

int bnbar_fit_series(const char* family, const long long* y, long long n,
                     const bnbar_fit_options* opts, bnbar_fit** out) {
  if (!family || !y || !out) return fail_input("null pointer argument");
  if (n < 1) return fail_input("series length must be positive");
  return wrap([&] {
    const std::vector<long long> series(y, y + n);
    *out = new bnbar_fit{bnbar::fit(bnbar::family_from_string(family), series,
                                    to_fit_options(opts))};
  });
}

int bnbar_fit_json(const bnbar_fit* f, char** out) {
  if (!f || !out) return fail_input("null pointer argument");
  return wrap([&] { *out = dup_string(bnbar::fit_to_json(f->res)); });
}

int bnbar_fit_param(const bnbar_fit* f, const char* name, double* out) {
  if (!f || !name || !out) return fail_input("null pointer argument");
  return wrap([&] { *out = f->res.kappa_hat[index_of(f, name)]; });
}

int bnbar_fit_se(const bnbar_fit* f, const char* name, double* out) {
  if (!f || !name || !out) return fail_input("null pointer argument");
  return wrap([&] {
    const std::size_t i = index_of(f, name);
    if (!f->res.se_available)
      throw bnbar::refusal_error(
          "standard errors are unavailable for this fit");
    *out = f->res.se[i];
  });
}

int bnbar_fit_loglik(const bnbar_fit* f, double* out) {
  if (!f || !out) return fail_input("null pointer argument");
  *out = f->res.loglik;
  return 0;
}

int bnbar_fit_aic(const bnbar_fit* f, double* out) {
  if (!f || !out) return fail_input("null pointer argument");
  *out = f->res.aic;
  return 0;
}

int bnbar_fit_delta(const bnbar_fit* f, double* out) {
  if (!f || !out) return fail_input("null pointer argument");
  *out = f->res.delta_hat;
  return 0;
}

int bnbar_fit_converged(const bnbar_fit* f, int* out) {
  if (!f || !out) return fail_input("null pointer argument");
  *out = f->res.converged ? 1 : 0;
  return 0;
}

int bnbar_fit_intensity(const bnbar_fit* f, double* buf) {
  if (!f || !buf) return fail_input("null pointer argument");
  std::memcpy(buf, f->res.lambda_hat.data(),
              f->res.lambda_hat.size() * sizeof(double));
  return 0;
}

void bnbar_fit_free(bnbar_fit* f) { delete f; }

int bnbar_mc_run(const char* family, const double* kappa, long long n_kappa,
                 const long long* sample_sizes, long long n_sizes, int n_reps,
                 unsigned long long seed, int n_workers,
                 const bnbar_fit_options* opts, bnbar_mc** out) {
  if (!family || !kappa || !sample_sizes || !out)
    return fail_input("null pointer argument");
  if (n_kappa < 1 || n_sizes < 1)
    return fail_input("kappa and sample_sizes must be nonempty");
  return wrap([&] {
    bnbar::McDesign d;
    d.family = bnbar::family_from_string(family);
    d.kappa_truth.assign(kappa, kappa + n_kappa);
    d.sample_sizes.assign(sample_sizes, sample_sizes + n_sizes);
    d.n_reps = n_reps;
    d.seed = seed;
    d.n_workers = n_workers;
    d.fit_options = to_fit_options(opts);
    *out = new bnbar_mc{bnbar::run_mc(d)};
  });
}

int bnbar_mc_csv(const bnbar_mc* m, char** out) {
  if (!m || !out) return fail_input("null pointer argument");
  return wrap([&] { *out = dup_string(bnbar::mc_to_csv(m->rep)); });
}

int bnbar_mc_json(const bnbar_mc* m, char** out) {
  if (!m || !out) return fail_input("null pointer argument");
  return wrap([&] { *out = dup_string(bnbar::mc_to_json(m->rep)); });
}

void bnbar_mc_free(bnbar_mc* m) { delete m; }

int bnbar_score_curve_csv(double lambda, double r, const double* alphas,
                          long long n_alphas, long long y_max, char** out) {
  if (!alphas || !out) return fail_input("null pointer argument");
  if (n_alphas < 1) return fail_input("need at least one alpha");
  return wrap([&] {
    const std::vector<double> a(alphas, alphas + n_alphas);
    *out = dup_string(bnbar::score_curve_csv(lambda, r, a, y_max));
  });
}

}  // extern "C"
