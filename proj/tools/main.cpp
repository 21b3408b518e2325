// command line front end; all model work goes through the public c api
#include <bnbar.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

// exit codes mirror the library status codes: 0 ok, 1 bad input,
// 2 refused, 3 numeric failure
int die(int status) {
  std::cerr << "error: " << bnbar_last_error() << "\n";
  return status;
}

int die_msg(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return 1;
}

void write_text(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
}

// shared model parameter block for commands that take a full specification
struct SpecArgs {
  std::string family;
  double r = 1.0;
  double alpha = 5.0;
  double omega = 0.0;
  double delta = 0.0;
  bool has_omega = false;
  bool has_delta = false;
  double phi = 0.0;
  double tau = 0.1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--family", family,
                    "bnb-ingarch, bnb-gas, nb-ingarch or nb-gas")
        ->required();
    cmd->add_option("--r", r, "dispersion parameter r > 0")->required();
    cmd->add_option("--alpha", alpha,
                    "tail parameter alpha > 1 (bnb families only)");
    auto* om = cmd->add_option("--omega", omega, "intensity intercept");
    auto* de = cmd->add_option(
        "--delta", delta, "long run level; alternative way to set the intercept");
    om->excludes(de);
    de->excludes(om);
    cmd->add_option("--phi", phi, "intensity feedback coefficient")->required();
    cmd->add_option("--tau", tau, "observation feedback coefficient")->required();
    cmd->final_callback([this, om, de] {
      has_omega = om->count() > 0;
      has_delta = de->count() > 0;
    });
  }

  // resolve the intercept, translating a requested long run level
  double resolve_omega() const {
    if (has_omega == has_delta)
      throw std::runtime_error("exactly one of --omega or --delta is required");
    if (has_omega) return omega;
    const bool gas = family == "bnb-gas" || family == "nb-gas";
    if (gas) {
      if (!(delta > 0.0)) throw std::runtime_error("--delta must be positive");
      return (1.0 - phi) * std::log(delta);
    }
    const double w = delta * (1.0 - phi - tau);
    if (!(w > 0.0))
      throw std::runtime_error(
          "--delta with phi + tau >= 1 implies a nonpositive intercept");
    return w;
  }
};

using ModelPtr = std::unique_ptr<bnbar_model, decltype(&bnbar_model_free)>;

ModelPtr make_model(const SpecArgs& s, int* status) {
  bnbar_model* m = nullptr;
  *status = bnbar_model_new(s.family.c_str(), s.r, s.alpha, s.resolve_omega(),
                            s.phi, s.tau, &m);
  return ModelPtr(m, &bnbar_model_free);
}

std::string take_string(char* s) {
  std::string out = s ? s : "";
  bnbar_string_free(s);
  return out;
}

// counts from a csv/text file: either a bare column of counts, or
// t,y / t,y,lambda rows; an optional header line is skipped
std::vector<long long> read_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<long long> y;
  std::string line;
  long long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream row(line);
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.empty()) continue;
    if (fields.size() > 3)
      throw std::runtime_error(path + " line " + std::to_string(line_no) +
                               ": expected at most 3 columns, got " +
                               std::to_string(fields.size()));
    const std::string& cell = fields.size() == 1 ? fields[0] : fields[1];
    try {
      std::size_t used = 0;
      const long long v = std::stoll(cell, &used);
      if (used != cell.size()) throw std::invalid_argument(cell);
      y.push_back(v);
    } catch (const std::exception&) {
      if (line_no == 1) continue;  // header row
      throw std::runtime_error(path + " line " + std::to_string(line_no) +
                               ": cannot parse count '" + cell + "'");
    }
  }
  if (y.empty()) throw std::runtime_error(path + ": no counts found");
  return y;
}

nlohmann::json spec_meta(const SpecArgs& s) {
  nlohmann::json j{{"family", s.family}, {"r", s.r},     {"omega", s.resolve_omega()},
                   {"phi", s.phi},       {"tau", s.tau}};
  if (s.family == "bnb-ingarch" || s.family == "bnb-gas") j["alpha"] = s.alpha;
  return j;
}

int run_simulate(const SpecArgs& spec, long long n, long long burn_in,
                 std::uint64_t seed, bool allow_nonstationary,
                 const std::vector<long long>& outlier_at,
                 const std::vector<double>& outlier_mag,
                 const std::string& output) {
  if (outlier_at.size() != outlier_mag.size())
    return die_msg("--outlier-at and --outlier-magnitude must be paired");
  int status = 0;
  const ModelPtr model = make_model(spec, &status);
  if (status != 0) return die(status);

  bnbar_path* raw = nullptr;
  status = bnbar_simulate(model.get(), n, burn_in, seed,
                          allow_nonstationary ? 1 : 0, &raw);
  if (status != 0) return die(status);
  std::unique_ptr<bnbar_path, decltype(&bnbar_path_free)> path(raw, &bnbar_path_free);

  if (!outlier_at.empty()) {
    bnbar_path* dirty = nullptr;
    status = bnbar_inject_outliers(path.get(), outlier_at.data(),
                                   outlier_mag.data(),
                                   static_cast<long long>(outlier_at.size()),
                                   &dirty);
    if (status != 0) return die(status);
    path.reset(dirty);
  }

  long long len = 0;
  bnbar_path_length(path.get(), &len);
  std::vector<long long> y(len);
  std::vector<double> lambda(len);
  bnbar_path_counts(path.get(), y.data());
  bnbar_path_intensity(path.get(), lambda.data());

  std::string csv = "t,y,lambda\n";
  char buf[64];
  for (long long t = 0; t < len; ++t) {
    std::snprintf(buf, sizeof(buf), "%lld,%lld,%.10g\n", t + 1, y[t], lambda[t]);
    csv += buf;
  }
  write_text(output, csv);

  if (output != "-") {
    long long clamp_hits = 0;
    bnbar_path_clamp_hits(path.get(), &clamp_hits);
    nlohmann::json meta{{"command", "simulate"},
                        {"model", spec_meta(spec)},
                        {"n", n},
                        {"burn_in", burn_in},
                        {"seed", seed},
                        {"allow_nonstationary", allow_nonstationary},
                        {"clamp_hits", clamp_hits}};
    nlohmann::json outliers = nlohmann::json::array();
    for (std::size_t i = 0; i < outlier_at.size(); ++i) {
      outliers.push_back(
          {{"position", outlier_at[i]}, {"magnitude", outlier_mag[i]}});
    }
    meta["outliers"] = outliers;
    write_text(output + ".meta.json", meta.dump(2) + "\n");
  }
  return 0;
}

int run_fit(const std::string& family, const std::string& input,
            const std::string& output, const std::string& intensity_out,
            int restarts, double tol, long long max_iter, bool no_se) {
  const std::vector<long long> y = read_series(input);
  bnbar_fit_options opts;
  bnbar_fit_options_default(&opts);
  opts.restarts = restarts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  opts.compute_se = no_se ? 0 : 1;

  bnbar_fit* raw = nullptr;
  const int status = bnbar_fit_series(family.c_str(), y.data(),
                                      static_cast<long long>(y.size()), &opts,
                                      &raw);
  if (status != 0) return die(status);
  std::unique_ptr<bnbar_fit, decltype(&bnbar_fit_free)> res(raw, &bnbar_fit_free);

  char* doc = nullptr;
  if (bnbar_fit_json(res.get(), &doc) != 0) return die(3);
  write_text(output, take_string(doc) + "\n");

  if (!intensity_out.empty()) {
    std::vector<double> lambda(y.size());
    bnbar_fit_intensity(res.get(), lambda.data());
    std::string csv = "t,y,lambda_hat\n";
    char buf[64];
    for (std::size_t t = 0; t < y.size(); ++t) {
      std::snprintf(buf, sizeof(buf), "%zu,%lld,%.10g\n", t + 1, y[t], lambda[t]);
      csv += buf;
    }
    write_text(intensity_out, csv);
  }
  return 0;
}

int run_mc(const SpecArgs& spec, const std::vector<long long>& sizes,
           int reps, std::uint64_t seed, int workers, int restarts, bool no_se,
           const std::string& format, const std::string& output) {
  std::vector<double> kappa{spec.r};
  const bool bnb = spec.family == "bnb-ingarch" || spec.family == "bnb-gas";
  if (bnb) kappa.push_back(spec.alpha);
  kappa.push_back(spec.resolve_omega());
  kappa.push_back(spec.phi);
  kappa.push_back(spec.tau);

  bnbar_fit_options opts;
  bnbar_fit_options_default(&opts);
  opts.restarts = restarts;
  opts.compute_se = no_se ? 0 : 1;

  bnbar_mc* raw = nullptr;
  const int status = bnbar_mc_run(
      spec.family.c_str(), kappa.data(), static_cast<long long>(kappa.size()),
      sizes.data(), static_cast<long long>(sizes.size()), reps, seed, workers,
      &opts, &raw);
  if (status != 0) return die(status);
  std::unique_ptr<bnbar_mc, decltype(&bnbar_mc_free)> mc(raw, &bnbar_mc_free);

  char* doc = nullptr;
  const int fmt_status = format == "json" ? bnbar_mc_json(mc.get(), &doc)
                                          : bnbar_mc_csv(mc.get(), &doc);
  if (fmt_status != 0) return die(fmt_status);
  write_text(output, take_string(doc) + (format == "json" ? "\n" : ""));

  if (output != "-" && format == "csv") {
    // worker count is omitted on purpose: it cannot affect the numbers
    nlohmann::json meta{{"command", "mc"},
                        {"model", spec_meta(spec)},
                        {"sample_sizes", sizes},
                        {"n_reps", reps},
                        {"seed", seed}};
    write_text(output + ".meta.json", meta.dump(2) + "\n");
  }
  return 0;
}

int run_score_curve(double lambda, double r, const std::vector<double>& alphas,
                    long long y_max, const std::string& output) {
  char* doc = nullptr;
  const int status = bnbar_score_curve_csv(
      lambda, r, alphas.data(), static_cast<long long>(alphas.size()), y_max,
      &doc);
  if (status != 0) return die(status);
  write_text(output, take_string(doc));
  return 0;
}

int run_check(const SpecArgs& spec, const std::string& output) {
  int status = 0;
  const ModelPtr model = make_model(spec, &status);
  if (status != 0) return die(status);
  char* doc = nullptr;
  status = bnbar_check_json(model.get(), &doc);
  if (status != 0) return die(status);
  write_text(output, take_string(doc) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"count time series with feedback intensity dynamics"};
  app.require_subcommand(1);

  // simulate ---------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "draw a path and write t,y,lambda csv");
  SpecArgs sim_spec;
  sim_spec.attach(sim);
  long long sim_n = 0, sim_burn = 500;
  std::uint64_t sim_seed = 0;
  bool sim_allow = false;
  std::vector<long long> outlier_at;
  std::vector<double> outlier_mag;
  std::string sim_out = "-";
  sim->add_option("--n", sim_n, "path length")->required()->check(CLI::PositiveNumber);
  sim->add_option("--burn-in", sim_burn, "discarded warmup steps")
      ->check(CLI::NonNegativeNumber);
  sim->add_option("--seed", sim_seed, "rng seed")->required();
  sim->add_flag("--allow-nonstationary", sim_allow,
                "simulate even when the stationarity check fails");
  sim->add_option("--outlier-at", outlier_at,
                  "positions whose counts are replaced (0 based)")
      ->delimiter(',');
  sim->add_option("--outlier-magnitude", outlier_mag,
                  "replacement size as a multiple of the path mean")
      ->delimiter(',');
  sim->add_option("-o,--output", sim_out, "output file, - for stdout");

  // fit --------------------------------------------------------------
  auto* fit = app.add_subcommand("fit", "maximum likelihood fit, json result");
  std::string fit_family, fit_input, fit_out = "-", fit_intensity;
  int fit_restarts = 3;
  double fit_tol = 1e-9;
  long long fit_max_iter = 4000;
  bool fit_no_se = false;
  fit->add_option("--family", fit_family,
                  "bnb-ingarch, bnb-gas, nb-ingarch or nb-gas")
      ->required();
  fit->add_option("--input", fit_input, "csv of counts (y, t,y or t,y,lambda)")
      ->required();
  fit->add_option("-o,--output", fit_out, "output file, - for stdout");
  fit->add_option("--intensity-out", fit_intensity,
                  "also write the fitted intensity path to this csv");
  fit->add_option("--restarts", fit_restarts, "jittered optimizer restarts");
  fit->add_option("--tol", fit_tol, "optimizer convergence tolerance");
  fit->add_option("--max-iter", fit_max_iter, "optimizer iteration cap");
  fit->add_flag("--no-se", fit_no_se, "skip the standard error pass");

  // mc ---------------------------------------------------------------
  auto* mc = app.add_subcommand("mc", "simulate and refit over a sample size grid");
  SpecArgs mc_spec;
  mc_spec.attach(mc);
  std::vector<long long> mc_sizes;
  int mc_reps = 100, mc_workers = 1, mc_restarts = 3;
  std::uint64_t mc_seed = 0;
  bool mc_no_se = false;
  std::string mc_format = "csv", mc_out = "-";
  mc->add_option("--sizes", mc_sizes, "sample sizes, e.g. 250,500,1000")
      ->required()
      ->delimiter(',');
  mc->add_option("--reps", mc_reps, "replications per sample size");
  mc->add_option("--seed", mc_seed, "base seed of the replication streams")
      ->required();
  mc->add_option("--workers", mc_workers, "worker threads (results identical)");
  mc->add_option("--restarts", mc_restarts, "optimizer restarts per fit");
  mc->add_flag("--no-se", mc_no_se, "skip standard errors in each fit");
  mc->add_option("--format", mc_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  mc->add_option("-o,--output", mc_out, "output file, - for stdout");

  // score-curve ------------------------------------------------------
  auto* sc = app.add_subcommand("score-curve",
                                "tabulate conditional scores against the count");
  double sc_lambda = 10.0, sc_r = 10.0;
  std::vector<double> sc_alphas;
  long long sc_ymax = 100;
  std::string sc_out = "-";
  sc->add_option("--lambda", sc_lambda, "conditional mean")->required();
  sc->add_option("--r", sc_r, "dispersion parameter")->required();
  sc->add_option("--alphas", sc_alphas, "tail parameters, e.g. 3,5,10")
      ->required()
      ->delimiter(',');
  sc->add_option("--y-max", sc_ymax, "largest count tabulated");
  sc->add_option("-o,--output", sc_out, "output file, - for stdout");

  // check ------------------------------------------------------------
  auto* check = app.add_subcommand("check", "stationarity report for a specification");
  SpecArgs check_spec;
  check_spec.attach(check);
  std::string check_out = "-";
  check->add_option("-o,--output", check_out, "output file, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (sim->parsed())
      return run_simulate(sim_spec, sim_n, sim_burn, sim_seed, sim_allow,
                          outlier_at, outlier_mag, sim_out);
    if (fit->parsed())
      return run_fit(fit_family, fit_input, fit_out, fit_intensity,
                     fit_restarts, fit_tol, fit_max_iter, fit_no_se);
    if (mc->parsed())
      return run_mc(mc_spec, mc_sizes, mc_reps, mc_seed, mc_workers,
                    mc_restarts, mc_no_se, mc_format, mc_out);
    if (sc->parsed())
      return run_score_curve(sc_lambda, sc_r, sc_alphas, sc_ymax, sc_out);
    if (check->parsed()) return run_check(check_spec, check_out);
  } catch (const std::exception& e) {
    return die_msg(e.what());
  }
  return die_msg("no subcommand given");
}
