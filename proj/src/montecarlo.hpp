#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "estimation.hpp"
#include "simulation.hpp"

namespace bnbar {

// Simulation study over a grid of sample sizes: simulate, refit, tabulate.
// Replication k at sample size T always runs on derive_seed(seed, T, k),
// so results are identical for any worker count.
struct McDesign {
  Family family = Family::bnb_ingarch;
  std::vector<double> kappa_truth;  // natural scale, fixed order
  std::vector<long long> sample_sizes;
  int n_reps = 100;
  std::uint64_t seed = 1;
  int n_workers = 1;
  long long burn_in = kDefaultBurnIn;
  bool allow_nonstationary = false;
  FitOptions fit_options;
};

// sampling distribution summary on the reporting scale
// (delta, tau, phi, inv_r and, for bnb, inv_alpha)
struct McReportCell {
  long long T = 0;
  std::string parameter;
  double truth = 0.0;
  double mean = 0.0;
  double sd = 0.0;    // population sd across successful replications
  double rmse = 0.0;  // rmse^2 == sd^2 + bias^2 by construction
};

// sampling distribution of the natural parameters, with the average
// estimated curvature standard error alongside the observed spread
struct McNaturalCell {
  long long T = 0;
  std::string parameter;
  double truth = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  double se_mean = 0.0;  // NaN when no replication produced standard errors
  int n_se = 0;          // replications contributing to se_mean
};

struct McTotals {
  long long T = 0;
  int n_ok = 0;
  int n_failed = 0;       // threw, non-finite estimate, or non-converged
  bool flagged = false;   // more than 10 percent failed
};

struct McReport {
  McDesign design;
  std::vector<std::string> report_names;  // column order of raw rows
  std::vector<McReportCell> report_cells;
  std::vector<McNaturalCell> natural_cells;
  std::vector<McTotals> totals;
  // raw[t_index][rep] holds the reporting scale estimates, empty row on
  // failure; kept so downstream checks can recompute any summary
  std::vector<std::vector<std::vector<double>>> raw;
};

McReport run_mc(const McDesign& design);

// pinned tabular export, columns T,parameter,truth,mean,sd,rmse
std::string mc_to_csv(const McReport& rep);
std::string mc_to_json(const McReport& rep);

// conditional score against the count at fixed intensity: one curve per
// alpha plus the nb limit; csv columns curve,y,score
std::string score_curve_csv(double lambda, double r,
                            const std::vector<double>& alphas, long long y_max);

}  // namespace bnbar
