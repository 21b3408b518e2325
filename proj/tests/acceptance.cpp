// Release gate. Every criterion prints one verdict line with its worst
// observed numbers and the process exits nonzero if any fails. All
// randomness is seeded, so a passing build passes bit for bit.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "distributions.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "estimation.hpp"
#include "montecarlo.hpp"
#include "rng.hpp"
#include "simulation.hpp"
#include "support.hpp"

using namespace bnbar;

namespace {

int g_failures = 0;

std::string fmt(const char* f, ...) {
  char buf[768];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Verdict {
  bool ok = false;
  std::string detail;
};

template <typename Fn>
void criterion(int num, const char* name, Fn&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v.ok = false;
    v.detail = fmt("unexpected exception: %s", e.what());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::printf("[%s] criterion %d: %s -- %s (%.1f s)\n", v.ok ? "PASS" : "FAIL",
              num, name, v.detail.c_str(), secs);
  std::fflush(stdout);
  if (!v.ok) ++g_failures;
}

bool invert(std::vector<std::vector<double>> a,
            std::vector<std::vector<double>>* inv) {
  const std::size_t n = a.size();
  inv->assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) (*inv)[i][i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t k = c + 1; k < n; ++k)
      if (std::fabs(a[k][c]) > std::fabs(a[piv][c])) piv = k;
    if (!(std::fabs(a[piv][c]) > 1e-300)) return false;
    std::swap(a[c], a[piv]);
    std::swap((*inv)[c], (*inv)[piv]);
    const double d = a[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      a[c][j] /= d;
      (*inv)[c][j] /= d;
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (k == c) continue;
      const double f = a[k][c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a[k][j] -= f * a[c][j];
        (*inv)[k][j] -= f * (*inv)[c][j];
      }
    }
  }
  return true;
}

// least squares slope of log(gap) against t over strictly positive gaps
double decay_slope(const std::vector<double>& gap) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (std::size_t t = 0; t < gap.size(); ++t) {
    if (!(gap[t] > 0.0)) continue;
    const double x = static_cast<double>(t);
    const double yv = std::log(gap[t]);
    sx += x;
    sy += yv;
    sxx += x * x;
    sxy += x * yv;
    ++n;
  }
  if (n < 3) return 1.0;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> filter_gap(const ModelSpec& m,
                               const std::vector<long long>& y) {
  const FilterOutput a = filter(m, y, 1.0);
  const FilterOutput b = filter(m, y, 100.0);
  std::vector<double> gap(y.size());
  for (std::size_t t = 0; t < y.size(); ++t)
    gap[t] = std::fabs(a.lambda_hat[t] - b.lambda_hat[t]);
  return gap;
}

Verdict distribution_grid() {
  const double lambdas[] = {1.0, 10.0, 50.0};
  const double rs[] = {0.5, 5.0, 50.0};
  const double alphas[] = {2.5, 5.0, 20.0};
  double w_mass = 0.0, w_mean = 0.0, w_second = 0.0, w_escore = 0.0, w_fd = 0.0;
  double order_margin = 1.0;
  for (double r : rs) {
    for (double alpha : alphas) {
      for (double lambda : lambdas) {
        const BnbParams p{lambda, r, alpha};
        const testsup::PmfSums s = testsup::sum_bnb_pmf(p);
        w_mass = std::max(w_mass, std::fabs(s.mass - 1.0));
        w_mean = std::max(w_mean, std::fabs(s.mean - lambda) / lambda);
        const BnbMoments mom = bnb_moments(p);
        w_second = std::max(w_second, std::fabs(s.second - mom.second_moment) /
                                          mom.second_moment);
        w_escore = std::max(w_escore,
                            std::fabs(testsup::sum_bnb_score_expectation(p)));
        const double h = 1e-6;
        for (long long y : {0LL, 1LL, 3LL, 10LL, 40LL, 120LL}) {
          const double sc = bnb_score_loglambda(y, p);
          const BnbParams up{lambda * std::exp(h), r, alpha};
          const BnbParams dn{lambda * std::exp(-h), r, alpha};
          const double fd =
              (bnb_log_pmf(y, up) - bnb_log_pmf(y, dn)) / (2.0 * h);
          w_fd = std::max(w_fd,
                          std::fabs(fd - sc) / std::max(1.0, std::fabs(sc)));
        }
      }
      // a larger mean must shift the whole cdf down
      std::vector<std::vector<double>> cdf;
      for (double lambda : lambdas) {
        const BnbParams p{lambda, r, alpha};
        std::vector<double> c(501);
        double term = std::exp(bnb_log_pmf(0, p));
        double acc = 0.0;
        for (long long y = 0; y <= 500; ++y) {
          acc += term;
          c[static_cast<std::size_t>(y)] = acc;
          term *= bnb_pmf_ratio(y, p);
        }
        cdf.push_back(std::move(c));
      }
      for (std::size_t y = 0; y <= 500; ++y) {
        order_margin = std::min(order_margin, cdf[0][y] - cdf[1][y]);
        order_margin = std::min(order_margin, cdf[1][y] - cdf[2][y]);
      }
    }
  }
  const bool ok = w_mass < 1e-8 && w_mean < 1e-6 && w_second < 1e-6 &&
                  w_escore < 1e-6 && w_fd < 1e-5 && order_margin > -1e-12;
  return {ok, fmt("worst over 27 triples: |mass-1| %.1e, mean rel %.1e, "
                  "second moment rel %.1e, |E score| %.1e, score vs fd %.1e, "
                  "cdf ordering margin %.1e",
                  w_mass, w_mean, w_second, w_escore, w_fd, order_margin)};
}

Verdict limit_cases() {
  double w1 = 0.0, w2 = 0.0;
  const BnbParams heavy{10.0, 10.0, 1e6};
  for (long long y = 0; y <= 400; ++y) {
    w1 = std::max(w1, std::fabs(std::exp(bnb_log_pmf(y, heavy)) -
                                std::exp(nb_log_pmf(y, 10.0, 10.0))));
    const double pois =
        std::exp(-10.0 + static_cast<double>(y) * std::log(10.0) -
                 std::lgamma(static_cast<double>(y) + 1.0));
    w2 = std::max(w2, std::fabs(std::exp(nb_log_pmf(y, 10.0, 1e6)) - pois));
  }
  const bool ok = w1 < 1e-3 && w2 < 1e-3;
  return {ok,
          fmt("max pmf gap: bnb(alpha=1e6) vs nb %.2e, nb(r=1e6) vs poisson "
              "%.2e",
              w1, w2)};
}

Verdict invertibility() {
  const ModelSpec mi =
      ModelSpec::from_family("bnb-ingarch", 10.0, 5.0, 3.0, 0.5, 0.2);
  const SimulatedPath pi = simulate(mi, 300, kDefaultBurnIn, 31001);
  const std::vector<double> gi = filter_gap(mi, pi.y);

  const ModelSpec mg = ModelSpec::from_family(
      "bnb-gas", 10.0, 5.0, 0.9 * std::log(10.0), 0.1, 0.001);
  const StationarityReport cert = check_strict_stationarity(mg);
  const SimulatedPath pg = simulate(mg, 300, kDefaultBurnIn, 31002);
  const std::vector<double> gg = filter_gap(mg, pg.y);

  const auto tail_max = [](const std::vector<double>& g) {
    double m = 0.0;
    for (std::size_t t = 199; t < g.size(); ++t) m = std::max(m, g[t]);
    return m;
  };
  const double ti = tail_max(gi), tg = tail_max(gg);
  const double si = decay_slope(gi), sg = decay_slope(gg);
  const bool ok =
      cert.holds && ti <= 1e-8 && tg <= 1e-8 && si < 0.0 && sg < 0.0;
  return {ok, fmt("ingarch gap past t=200 %.1e slope %.3f; gas cert %.3f, gap "
                  "%.1e slope %.3f",
                  ti, si, cert.value, tg, sg)};
}

// shared replication loop behind criteria 4 and 5: refit 200 seeded draws
// of the reference design at T = 1000 and summarize on the reporting
// scale delta, phi, tau, 1/r, 1/alpha
struct RecoveryStudy {
  bool ran = false;
  std::string error;
  int n_ok = 0, n_fail = 0, n_se = 0;
  double mean[5] = {0};
  double sd[5] = {0};
  double rmse[5] = {0};
  double se_mean[5] = {0};
};

const RecoveryStudy& recovery_study() {
  static RecoveryStudy st;
  if (st.ran) return st;
  st.ran = true;
  try {
    const ModelSpec truth =
        ModelSpec::from_family("bnb-ingarch", 10.0, 5.0, 3.0, 0.5, 0.2);
    const double target[5] = {10.0, 0.5, 0.2, 0.1, 0.2};
    const long long T = 1000;
    const int n_reps = 200;
    const std::uint64_t seed = 1000003;
    std::vector<std::vector<double>> est, ses;
    for (int k = 0; k < n_reps; ++k) {
      const SimulatedPath path =
          simulate(truth, T, kDefaultBurnIn,
                   derive_seed(seed, static_cast<std::uint64_t>(T),
                               static_cast<std::uint64_t>(k)));
      FitResult res;
      try {
        res = fit(Family::bnb_ingarch, path.y);
      } catch (const std::exception&) {
        ++st.n_fail;
        continue;
      }
      if (!res.converged) {
        ++st.n_fail;
        continue;
      }
      const double r = res.kappa_hat[0], a = res.kappa_hat[1];
      const double w = res.kappa_hat[2];
      const double ph = res.kappa_hat[3], ta = res.kappa_hat[4];
      const std::vector<double> row{res.delta_hat, ph, ta, 1.0 / r, 1.0 / a};
      bool finite = true;
      for (double v : row) finite = finite && std::isfinite(v);
      if (!finite) {
        ++st.n_fail;
        continue;
      }
      est.push_back(row);
      if (res.fisher.empty()) continue;
      std::vector<std::vector<double>> cov;
      if (!invert(res.fisher, &cov)) continue;
      for (auto& cr : cov)
        for (double& v : cr) v /= static_cast<double>(T);
      // delta method for the long run level omega / (1 - phi - tau)
      const double den = 1.0 - ph - ta;
      const std::vector<double> g{0.0, 0.0, 1.0 / den, w / (den * den),
                                  w / (den * den)};
      double var_delta = 0.0;
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) var_delta += g[i] * cov[i][j] * g[j];
      if (!(var_delta > 0.0) || !(cov[0][0] > 0.0) || !(cov[1][1] > 0.0) ||
          !(cov[3][3] > 0.0) || !(cov[4][4] > 0.0))
        continue;
      ses.push_back({std::sqrt(var_delta), std::sqrt(cov[3][3]),
                     std::sqrt(cov[4][4]), std::sqrt(cov[0][0]) / (r * r),
                     std::sqrt(cov[1][1]) / (a * a)});
    }
    st.n_ok = static_cast<int>(est.size());
    st.n_se = static_cast<int>(ses.size());
    if (st.n_ok < 2) {
      st.error = fmt("only %d usable replications", st.n_ok);
      return st;
    }
    for (int j = 0; j < 5; ++j) {
      double m = 0.0;
      for (const auto& row : est) m += row[j];
      m /= st.n_ok;
      double v = 0.0, msq = 0.0;
      for (const auto& row : est) {
        v += (row[j] - m) * (row[j] - m);
        msq += (row[j] - target[j]) * (row[j] - target[j]);
      }
      st.mean[j] = m;
      st.sd[j] = std::sqrt(v / st.n_ok);
      st.rmse[j] = std::sqrt(msq / st.n_ok);
      double sm = 0.0;
      for (const auto& row : ses) sm += row[j];
      st.se_mean[j] = st.n_se > 0 ? sm / st.n_se
                                  : std::numeric_limits<double>::quiet_NaN();
    }
  } catch (const std::exception& e) {
    st.error = e.what();
  }
  return st;
}

Verdict recovery_bands() {
  const RecoveryStudy& st = recovery_study();
  if (!st.error.empty()) return {false, "replication loop failed: " + st.error};
  std::string bad;
  const auto band = [&](const char* name, double got, double center,
                        double tol) {
    if (!(std::fabs(got - center) <= tol))
      bad += fmt(" mean(%s)=%.4f outside %.3f+-%.3f;", name, got, center, tol);
  };
  band("delta", st.mean[0], 9.976, 0.15);
  band("phi", st.mean[1], 0.492, 0.03);
  band("tau", st.mean[2], 0.199, 0.01);
  band("inv_alpha", st.mean[4], 0.190, 0.01);
  const auto rmse_band = [&](const char* name, double got, double ref) {
    if (!(got >= 0.75 * ref && got <= 1.25 * ref))
      bad += fmt(" rmse(%s)=%.4f outside 25%% of %.3f;", name, got, ref);
  };
  rmse_band("delta", st.rmse[0], 0.510);
  rmse_band("phi", st.rmse[1], 0.091);
  rmse_band("tau", st.rmse[2], 0.033);
  rmse_band("inv_alpha", st.rmse[4], 0.027);
  if (!bad.empty())
    return {false, fmt("%d/%d replications converged;%s", st.n_ok,
                       st.n_ok + st.n_fail, bad.c_str())};
  return {true,
          fmt("%d/%d replications converged; means %.3f/%.3f/%.3f/%.3f, rmse "
              "%.3f/%.3f/%.3f/%.3f (delta/phi/tau/inv_alpha)",
              st.n_ok, st.n_ok + st.n_fail, st.mean[0], st.mean[1], st.mean[2],
              st.mean[4], st.rmse[0], st.rmse[1], st.rmse[2], st.rmse[4])};
}

Verdict se_calibration() {
  const RecoveryStudy& st = recovery_study();
  if (!st.error.empty()) return {false, "replication loop failed: " + st.error};
  if (st.n_se < 2)
    return {false, fmt("only %d replications produced standard errors",
                       st.n_se)};
  static const char* names[5] = {"delta", "phi", "tau", "inv_r", "inv_alpha"};
  // 1/r is reported but not gated: its sampling distribution at this
  // sample size is dominated by excursions along the r/alpha likelihood
  // ridge, so no curvature based interval can be calibrated for it. The
  // recovery bands above skip it for the same reason.
  std::string parts, bad;
  for (int j = 0; j < 5; ++j) {
    const double ratio = st.se_mean[j] / st.sd[j];
    parts += fmt("%s%s %.2f", j ? ", " : "", names[j], ratio);
    if (j == 3) continue;
    if (!(ratio >= 0.8 && ratio <= 1.2)) bad += fmt(" %s=%.2f;", names[j], ratio);
  }
  if (!bad.empty())
    return {false, fmt("mean se / mc sd outside [0.8, 1.2]:%s (all: %s)",
                       bad.c_str(), parts.c_str())};
  return {true, fmt("mean se / mc sd: %s over %d replications", parts.c_str(),
                    st.n_se)};
}

Verdict aic_bookkeeping() {
  const ModelSpec m =
      ModelSpec::from_family("nb-ingarch", 10.0, 5.0, 3.0, 0.5, 0.2);
  const SimulatedPath path = simulate(m, 160, kDefaultBurnIn, 6001);
  FitOptions fo;
  fo.restarts = 1;
  fo.compute_se = false;
  const FitResult res = fit(Family::nb_ingarch, path.y, fo);
  const double ident = std::fabs(res.aic - (2.0 * 4.0 - 2.0 * res.loglik));
  const double pin1 = std::fabs((2.0 * 5.0 - 2.0 * (-807.04)) - 1624.09);
  const double pin2 = std::fabs((2.0 * 4.0 - 2.0 * (-821.22)) - 1650.45);
  const bool ok = ident < 1e-9 && pin1 <= 0.01 && pin2 <= 0.01;
  return {ok, fmt("fit identity gap %.1e, k=5 pin off by %.4f, k=4 pin off by "
                  "%.4f",
                  ident, pin1, pin2)};
}

Verdict robustness_contrast() {
  // dynamics strong enough that the nb fit cannot explain the outliers
  // away by flattening its own recursion
  const ModelSpec truth = ModelSpec::from_family(
      "bnb-gas", 4.4, 5.0, 0.2 * std::log(8.0), 0.8, 0.25);
  const std::vector<long long> pos{60, 140, 220};
  const std::vector<double> mag{15.0, 15.0, 15.0};
  const std::uint64_t seed = 13;
  const long long T = 264;

  const SimulatedPath clean = simulate(truth, T, kDefaultBurnIn, seed, true);
  const SimulatedPath dirty = inject_outliers(clean, pos, mag);
  FitOptions fo;
  fo.compute_se = false;
  const FitResult fit_bnb = fit(Family::bnb_gas, dirty.y, fo);
  const FitResult fit_nb = fit(Family::nb_gas, dirty.y, fo);

  // lambda_hat[p+1] is the first prediction computed from the
  // contaminated observation, so its rise over the pre outlier level
  // isolates the filter's response to the outlier itself
  const auto excursion = [&](const std::vector<double>& lh) {
    double worst = 0.0;
    for (long long p : pos) {
      const std::size_t i = static_cast<std::size_t>(p);
      worst = std::max(worst, (lh[i + 1] - lh[i]) / lh[i]);
    }
    return worst;
  };
  const double e_bnb = excursion(fit_bnb.lambda_hat);
  const double e_nb = excursion(fit_nb.lambda_hat);

  FitOptions fq;
  fq.restarts = 1;
  fq.compute_se = false;
  const Family fams[4] = {Family::bnb_ingarch, Family::bnb_gas,
                          Family::nb_ingarch, Family::nb_gas};
  int wins = 0, errors = 0;
  const int n_reps = 100;
  for (int k = 0; k < n_reps; ++k) {
    SimulatedPath rep;
    try {
      rep = inject_outliers(
          simulate(truth, T, kDefaultBurnIn,
                   derive_seed(seed, static_cast<std::uint64_t>(T),
                               static_cast<std::uint64_t>(k)),
                   true),
          pos, mag);
    } catch (const std::exception&) {
      ++errors;
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    bool best_bnb = false;
    bool all_ok = true;
    for (Family f : fams) {
      double aic = std::numeric_limits<double>::infinity();
      try {
        const FitResult r = fit(f, rep.y, fq);
        if (std::isfinite(r.aic)) aic = r.aic;
      } catch (const std::exception&) {
        all_ok = false;
      }
      if (aic < best) {
        best = aic;
        best_bnb = family_is_bnb(f);
      }
    }
    if (!all_ok) {
      ++errors;
      continue;
    }
    if (best_bnb) ++wins;
  }
  const bool ok = e_bnb <= 0.5 * e_nb && wins >= 80;
  return {ok, fmt("post outlier excursion bnb %.2f vs nb %.2f, aic wins %d/%d "
                  "(%d errored)",
                  e_bnb, e_nb, wins, n_reps, errors)};
}

Verdict score_shape() {
  const double r = 5.0, lambda = 10.0;
  const double alphas[3] = {3.0, 5.0, 20.0};
  double plateau[3] = {0};
  double worst_bound = 0.0, worst_mono = 0.0;
  for (int i = 0; i < 3; ++i) {
    const BnbParams p{lambda, r, alphas[i]};
    const double lo = -(alphas[i] + r + 1.0), hi = alphas[i] + 1.0;
    double prev = 0.0;
    for (long long y = 0; y <= 500; ++y) {
      const double s = bnb_score_loglambda(y, p);
      worst_bound = std::max(worst_bound, std::max(lo - s, s - hi));
      if (y > 0) worst_mono = std::max(worst_mono, prev - s);
      prev = s;
    }
    plateau[i] = prev;
  }
  const bool ordered = plateau[0] < plateau[1] && plateau[1] < plateau[2];
  const bool ok = worst_bound <= 1e-9 && worst_mono <= 1e-12 && ordered;
  return {ok, fmt("bound overshoot %.1e, monotonicity slack %.1e, plateaus "
                  "%.3f < %.3f < %.3f",
                  worst_bound, worst_mono, plateau[0], plateau[1], plateau[2])};
}

Verdict reproducibility() {
  const ModelSpec m =
      ModelSpec::from_family("bnb-ingarch", 10.0, 5.0, 3.0, 0.5, 0.2);
  const SimulatedPath a = simulate(m, 400, kDefaultBurnIn, 777);
  const SimulatedPath b = simulate(m, 400, kDefaultBurnIn, 777);
  const bool paths_equal = a.y == b.y && a.lambda == b.lambda;

  McDesign d;
  d.family = Family::bnb_ingarch;
  d.kappa_truth = {10.0, 5.0, 3.0, 0.5, 0.2};
  d.sample_sizes = {120};
  d.n_reps = 6;
  d.seed = 99;
  d.fit_options.restarts = 1;
  d.fit_options.compute_se = false;
  const McReport r1 = run_mc(d);
  const McReport r2 = run_mc(d);
  McDesign d3 = d;
  d3.n_workers = 3;
  const McReport r3 = run_mc(d3);
  const bool rerun_equal =
      mc_to_csv(r1) == mc_to_csv(r2) && mc_to_json(r1) == mc_to_json(r2);
  const bool worker_equal = mc_to_csv(r1) == mc_to_csv(r3);
  const bool ok = paths_equal && rerun_equal && worker_equal;
  return {ok, fmt("simulate rerun %s, mc rerun %s, workers 1 vs 3 %s",
                  paths_equal ? "identical" : "DIFFERS",
                  rerun_equal ? "identical" : "DIFFERS",
                  worker_equal ? "identical" : "DIFFERS")};
}

}  // namespace

int main() {
  criterion(1, "pmf mass, moments, score identity and ordering on the grid",
            distribution_grid);
  criterion(2, "negative binomial and poisson limiting cases", limit_cases);
  criterion(3, "filters forget their initialization", invertibility);
  criterion(4, "sampling distribution of the estimator at T = 1000",
            recovery_bands);
  criterion(5, "curvature standard errors track the sampling spread",
            se_calibration);
  criterion(6, "aic bookkeeping", aic_bookkeeping);
  criterion(7, "bounded score damps outliers and wins the aic ranking",
            robustness_contrast);
  criterion(8, "score bounds, monotonicity and plateau ordering", score_shape);
  criterion(9, "seeded runs repeat byte for byte at any worker count",
            reproducibility);
  if (g_failures == 0) {
    std::printf("acceptance: all 9 criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", g_failures);
  return 1;
}
