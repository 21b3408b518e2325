#include "montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <limits>
#include <thread>

#include "distributions.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace bnbar {

namespace {

std::vector<std::string> report_names_for(Family f) {
  if (family_is_bnb(f)) return {"delta", "tau", "phi", "inv_r", "inv_alpha"};
  return {"delta", "tau", "phi", "inv_r"};
}

std::vector<double> report_scale(Family f, const std::vector<double>& kappa,
                                 double delta) {
  const bool bnb = family_is_bnb(f);
  const std::size_t c = bnb ? 2 : 1;
  std::vector<double> row{delta, kappa[c + 2], kappa[c + 1], 1.0 / kappa[0]};
  if (bnb) row.push_back(1.0 / kappa[1]);
  return row;
}

double truth_delta(const ModelSpec& m) {
  try {
    return m.delta();
  } catch (const error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

struct RepOut {
  bool ok = false;
  std::vector<double> report;
  std::vector<double> natural;
  std::vector<double> se;
  bool has_se = false;
};

RepOut one_rep(const McDesign& d, const ModelSpec& truth, long long T, int k) {
  RepOut out;
  try {
    const SimulatedPath path =
        simulate(truth, T, d.burn_in,
                 derive_seed(d.seed, static_cast<std::uint64_t>(T),
                             static_cast<std::uint64_t>(k)),
                 d.allow_nonstationary);
    const FitResult res = fit(d.family, path.y, d.fit_options);
    if (!res.converged) return out;
    out.report = report_scale(d.family, res.kappa_hat, res.delta_hat);
    out.natural = res.kappa_hat;
    for (double v : out.report) {
      if (!std::isfinite(v)) return out;
    }
    for (double v : out.natural) {
      if (!std::isfinite(v)) return out;
    }
    out.has_se = res.se_available;
    if (out.has_se) out.se = res.se;
    out.ok = true;
  } catch (const error&) {
  }
  return out;
}

struct Moments {
  double mean = 0.0, sd = 0.0, rmse = 0.0;
  int n = 0;
};

Moments moments(const std::vector<double>& xs, double truth) {
  Moments m;
  m.n = static_cast<int>(xs.size());
  if (m.n == 0) return m;
  for (double x : xs) m.mean += x;
  m.mean /= m.n;
  double s2 = 0.0, e2 = 0.0;
  for (double x : xs) {
    s2 += (x - m.mean) * (x - m.mean);
    e2 += (x - truth) * (x - truth);
  }
  m.sd = std::sqrt(s2 / m.n);
  m.rmse = std::sqrt(e2 / m.n);
  return m;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

McReport run_mc(const McDesign& d) {
  if (d.n_reps < 1) throw input_error("n_reps must be at least 1");
  if (d.n_workers < 1) throw input_error("n_workers must be at least 1");
  if (d.sample_sizes.empty()) throw input_error("no sample sizes given");
  for (long long T : d.sample_sizes) {
    if (T < static_cast<long long>(kMinFitLength))
      throw input_error("sample size " + std::to_string(T) +
                        " is below the minimum fit length");
  }
  const ModelSpec truth = spec_from_kappa(d.family, d.kappa_truth);

  const std::size_t n_t = d.sample_sizes.size();
  std::vector<std::vector<RepOut>> results(n_t);
  for (auto& row : results) row.resize(d.n_reps);

  const std::size_t n_jobs = n_t * static_cast<std::size_t>(d.n_reps);
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= n_jobs) return;
      const std::size_t ti = job / d.n_reps;
      const int k = static_cast<int>(job % d.n_reps);
      results[ti][k] = one_rep(d, truth, d.sample_sizes[ti], k);
    }
  };
  const int n_workers = std::min<int>(d.n_workers, static_cast<int>(n_jobs));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  McReport rep;
  rep.design = d;
  rep.report_names = report_names_for(d.family);
  const std::vector<double> truth_report =
      report_scale(d.family, d.kappa_truth, truth_delta(truth));
  const std::vector<std::string> natural_names = family_param_names(d.family);
  rep.raw.resize(n_t);

  for (std::size_t ti = 0; ti < n_t; ++ti) {
    const long long T = d.sample_sizes[ti];
    McTotals tot;
    tot.T = T;
    rep.raw[ti].reserve(d.n_reps);
    for (const RepOut& r : results[ti]) {
      tot.n_ok += r.ok;
      tot.n_failed += !r.ok;
      rep.raw[ti].push_back(r.ok ? r.report : std::vector<double>{});
    }
    tot.flagged = tot.n_failed * 10 > d.n_reps;
    rep.totals.push_back(tot);

    for (std::size_t j = 0; j < rep.report_names.size(); ++j) {
      std::vector<double> xs;
      xs.reserve(tot.n_ok);
      for (const RepOut& r : results[ti]) {
        if (r.ok) xs.push_back(r.report[j]);
      }
      const Moments m = moments(xs, truth_report[j]);
      rep.report_cells.push_back(
          {T, rep.report_names[j], truth_report[j], m.mean, m.sd, m.rmse});
    }
    for (std::size_t j = 0; j < natural_names.size(); ++j) {
      std::vector<double> xs, ses;
      for (const RepOut& r : results[ti]) {
        if (!r.ok) continue;
        xs.push_back(r.natural[j]);
        if (r.has_se) ses.push_back(r.se[j]);
      }
      const Moments m = moments(xs, d.kappa_truth[j]);
      McNaturalCell cell{T,      natural_names[j], d.kappa_truth[j],
                         m.mean, m.sd,             0.0,
                         0};
      cell.n_se = static_cast<int>(ses.size());
      if (ses.empty()) {
        cell.se_mean = std::numeric_limits<double>::quiet_NaN();
      } else {
        double s = 0.0;
        for (double v : ses) s += v;
        cell.se_mean = s / ses.size();
      }
      rep.natural_cells.push_back(cell);
    }
  }
  return rep;
}

std::string mc_to_csv(const McReport& rep) {
  std::string out = "T,parameter,truth,mean,sd,rmse\n";
  for (const McReportCell& c : rep.report_cells) {
    out += std::to_string(c.T) + "," + c.parameter + "," + fmt(c.truth) + "," +
           fmt(c.mean) + "," + fmt(c.sd) + "," + fmt(c.rmse) + "\n";
  }
  return out;
}

std::string mc_to_json(const McReport& rep) {
  nlohmann::json j;
  j["design"] = {{"family", family_to_string(rep.design.family)},
                 {"kappa_truth", rep.design.kappa_truth},
                 {"sample_sizes", rep.design.sample_sizes},
                 {"n_reps", rep.design.n_reps},
                 {"seed", rep.design.seed},
                 {"n_workers", rep.design.n_workers},
                 {"burn_in", rep.design.burn_in},
                 {"allow_nonstationary", rep.design.allow_nonstationary}};
  nlohmann::json totals = nlohmann::json::array();
  for (const McTotals& t : rep.totals) {
    totals.push_back({{"T", t.T},
                      {"n_ok", t.n_ok},
                      {"n_failed", t.n_failed},
                      {"flagged", t.flagged}});
  }
  j["totals"] = totals;
  nlohmann::json cells = nlohmann::json::array();
  for (const McReportCell& c : rep.report_cells) {
    cells.push_back({{"T", c.T},
                     {"parameter", c.parameter},
                     {"truth", c.truth},
                     {"mean", c.mean},
                     {"sd", c.sd},
                     {"rmse", c.rmse}});
  }
  j["report"] = cells;
  nlohmann::json nat = nlohmann::json::array();
  for (const McNaturalCell& c : rep.natural_cells) {
    nat.push_back({{"T", c.T},
                   {"parameter", c.parameter},
                   {"truth", c.truth},
                   {"mean", c.mean},
                   {"sd", c.sd},
                   {"se_mean", c.se_mean},
                   {"n_se", c.n_se}});
  }
  j["natural"] = nat;
  j["raw"] = rep.raw;
  return j.dump(2);
}

std::string score_curve_csv(double lambda, double r,
                            const std::vector<double>& alphas, long long y_max) {
  if (!(lambda > 0.0) || !(r > 0.0))
    throw input_error("score curve needs lambda > 0 and r > 0");
  if (y_max < 0) throw input_error("y_max must be nonnegative");
  for (double a : alphas) {
    if (!(a > 1.0))
      throw input_error("score curve alphas must exceed 1, got " + fmt(a));
  }
  std::string out = "curve,y,score\n";
  for (double a : alphas) {
    const BnbParams p{lambda, r, a};
    const std::string label = "bnb-alpha-" + fmt(a);
    for (long long y = 0; y <= y_max; ++y) {
      out += label + "," + std::to_string(y) + "," +
             fmt(bnb_score_loglambda(y, p)) + "\n";
    }
  }
  for (long long y = 0; y <= y_max; ++y) {
    out += "nb," + std::to_string(y) + "," +
           fmt(nb_score_loglambda(y, lambda, r)) + "\n";
  }
  return out;
}

}  // namespace bnbar
