#include "nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "errors.hpp"

namespace bnbar {

NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                     const std::vector<double>& x0, double step, double tol,
                     long long max_iter) {
  const std::size_t n = x0.size();
  if (n == 0) throw input_error("optimizer needs at least one coordinate");

  NmResult res;
  auto eval = [&](const std::vector<double>& x) {
    ++res.n_eval;
    const double v = f(x);
    return std::isfinite(v) ? v : 1e12;
  };

  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

  const double rho = 1.0, chi = 2.0, gam = 0.5, sig = 0.5;
  std::deque<double> best_history;

  for (long long iter = 0; iter < max_iter; ++iter) {
    // order the simplex, best first
    std::vector<std::size_t> idx(n + 1);
    for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    {
      std::vector<std::vector<double>> s2(n + 1);
      std::vector<double> f2(n + 1);
      for (std::size_t i = 0; i <= n; ++i) {
        s2[i] = simplex[idx[i]];
        f2[i] = fv[idx[i]];
      }
      simplex.swap(s2);
      fv.swap(f2);
    }

    best_history.push_back(fv[0]);
    if (best_history.size() > n + 2) {
      const double improvement = best_history.front() - fv[0];
      best_history.pop_front();
      // also require the simplex to have collapsed in value, otherwise a
      // few stalled iterations mid-run would stop the search early
      if (improvement < tol && fv[n] - fv[0] < 100.0 * tol) {
        res.converged = true;
        break;
      }
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    auto blend = [&](double coef) {
      std::vector<double> x(n);
      for (std::size_t j = 0; j < n; ++j)
        x[j] = centroid[j] + coef * (centroid[j] - simplex[n][j]);
      return x;
    };

    const auto xr = blend(rho);
    const double fr = eval(xr);
    if (fr < fv[0]) {
      const auto xe = blend(rho * chi);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[n] = xe;
        fv[n] = fe;
      } else {
        simplex[n] = xr;
        fv[n] = fr;
      }
      continue;
    }
    if (fr < fv[n - 1]) {
      simplex[n] = xr;
      fv[n] = fr;
      continue;
    }
    if (fr < fv[n]) {
      // outside contraction
      const auto xc = blend(rho * gam);
      const double fc = eval(xc);
      if (fc <= fr) {
        simplex[n] = xc;
        fv[n] = fc;
        continue;
      }
    } else {
      // inside contraction
      const auto xc = blend(-gam);
      const double fc = eval(xc);
      if (fc < fv[n]) {
        simplex[n] = xc;
        fv[n] = fc;
        continue;
      }
    }
    // shrink toward the best vertex
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j)
        simplex[i][j] = simplex[0][j] + sig * (simplex[i][j] - simplex[0][j]);
      fv[i] = eval(simplex[i]);
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (fv[i] < fv[best]) best = i;
  }
  res.x = simplex[best];
  res.fmin = fv[best];
  return res;
}

}  // namespace bnbar
