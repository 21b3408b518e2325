#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <sstream>
#include <vector>

#include "errors.hpp"
#include "montecarlo.hpp"

using namespace bnbar;

namespace {

McDesign small_design() {
  McDesign d;
  d.family = Family::bnb_ingarch;
  d.kappa_truth = {10.0, 5.0, 3.0, 0.2, 0.5};
  d.sample_sizes = {200};
  d.n_reps = 6;
  d.seed = 99;
  d.fit_options.compute_se = false;
  d.fit_options.restarts = 1;
  return d;
}

double cell(const McReport& rep, long long T, const std::string& param,
            double McReportCell::*field) {
  for (const auto& c : rep.report_cells) {
    if (c.T == T && c.parameter == param) return c.*field;
  }
  REQUIRE(false);
  return 0.0;
}

}  // namespace

TEST_CASE("run_mc validates its design") {
  McDesign d = small_design();
  d.n_reps = 0;
  CHECK_THROWS_AS(run_mc(d), input_error);
  d = small_design();
  d.sample_sizes = {};
  CHECK_THROWS_AS(run_mc(d), input_error);
  d = small_design();
  d.sample_sizes = {10};
  CHECK_THROWS_AS(run_mc(d), input_error);
  d = small_design();
  d.kappa_truth = {10.0, 5.0, 3.0, 0.2};
  CHECK_THROWS_AS(run_mc(d), input_error);
}

TEST_CASE("a single replication reproduces the single fit") {
  McDesign d = small_design();
  d.n_reps = 1;
  d.sample_sizes = {300};
  const McReport rep = run_mc(d);
  REQUIRE(rep.totals.size() == 1);
  REQUIRE(rep.totals[0].n_ok == 1);

  const SimulatedPath path =
      simulate(spec_from_kappa(d.family, d.kappa_truth), 300, d.burn_in,
               derive_seed(d.seed, 300, 0));
  const FitResult res = fit(d.family, path.y, d.fit_options);
  CHECK(cell(rep, 300, "delta", &McReportCell::mean) ==
        doctest::Approx(res.delta_hat).epsilon(1e-14));
  CHECK(cell(rep, 300, "tau", &McReportCell::mean) ==
        doctest::Approx(res.kappa_hat[4]).epsilon(1e-14));
  CHECK(cell(rep, 300, "inv_alpha", &McReportCell::mean) ==
        doctest::Approx(1.0 / res.kappa_hat[1]).epsilon(1e-14));
  CHECK(cell(rep, 300, "delta", &McReportCell::sd) == doctest::Approx(0.0));
}

TEST_CASE("rmse decomposes into spread and bias") {
  McDesign d = small_design();
  const McReport rep = run_mc(d);
  for (const auto& c : rep.report_cells) {
    const double bias = c.mean - c.truth;
    CHECK(c.rmse * c.rmse ==
          doctest::Approx(c.sd * c.sd + bias * bias).epsilon(1e-10));
  }
}

TEST_CASE("worker count does not change a single byte") {
  McDesign d = small_design();
  d.sample_sizes = {200, 250};
  d.n_workers = 1;
  const McReport a = run_mc(d);
  d.n_workers = 3;
  const McReport b = run_mc(d);
  CHECK(mc_to_csv(a) == mc_to_csv(b));
  const nlohmann::json ja = nlohmann::json::parse(mc_to_json(a));
  const nlohmann::json jb = nlohmann::json::parse(mc_to_json(b));
  CHECK(ja["raw"] == jb["raw"]);
  CHECK(ja["report"] == jb["report"]);
  CHECK(jb["design"]["n_workers"] == 3);
}

TEST_CASE("estimates tighten as the sample grows") {
  McDesign d = small_design();
  d.sample_sizes = {250, 2000};
  d.n_reps = 24;
  d.seed = 31415;
  const McReport rep = run_mc(d);
  for (const auto& t : rep.totals) CHECK_FALSE(t.flagged);
  // an eightfold sample should cut the rmse by roughly sqrt(8); allow a
  // generous margin since 24 replications is a rough estimate of it
  for (const std::string& p : {"delta", "tau", "phi", "inv_r", "inv_alpha"}) {
    const double small_rmse = cell(rep, 250, p, &McReportCell::rmse);
    const double big_rmse = cell(rep, 2000, p, &McReportCell::rmse);
    CHECK(big_rmse < 0.75 * small_rmse);
  }
}

TEST_CASE("csv export has the pinned header and full grid") {
  McDesign d = small_design();
  const McReport rep = run_mc(d);
  const std::string csv = mc_to_csv(rep);
  std::istringstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "T,parameter,truth,mean,sd,rmse");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 5);  // one sample size, five reported parameters
  CHECK(csv.find("200,delta,10,") == csv.find("200,delta,"));
}

TEST_CASE("json export carries totals, natural cells and raw draws") {
  McDesign d = small_design();
  d.fit_options.compute_se = true;
  const McReport rep = run_mc(d);
  const nlohmann::json j = nlohmann::json::parse(mc_to_json(rep));
  CHECK(j["design"]["family"] == "bnb-ingarch");
  CHECK(j["totals"][0]["n_ok"].get<int>() + j["totals"][0]["n_failed"].get<int>() ==
        d.n_reps);
  REQUIRE(j["raw"].size() == 1);
  REQUIRE(j["raw"][0].size() == static_cast<std::size_t>(d.n_reps));
  bool found_r = false;
  for (const auto& c : j["natural"]) {
    if (c["parameter"] == "r") {
      found_r = true;
      CHECK(c["truth"].get<double>() == doctest::Approx(10.0));
      if (c["n_se"].get<int>() > 0) CHECK(c["se_mean"].get<double>() > 0.0);
    }
  }
  CHECK(found_r);
}

TEST_CASE("nb designs drop the alpha column") {
  McDesign d = small_design();
  d.family = Family::nb_ingarch;
  d.kappa_truth = {10.0, 3.0, 0.2, 0.5};
  d.n_reps = 2;
  const McReport rep = run_mc(d);
  CHECK(rep.report_names ==
        std::vector<std::string>{"delta", "tau", "phi", "inv_r"});
  CHECK(mc_to_csv(rep).find("inv_alpha") == std::string::npos);
}

TEST_CASE("score curve csv compares bounded and unbounded scores") {
  const std::string csv = score_curve_csv(10.0, 10.0, {3.0, 5.0}, 200);
  std::istringstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "curve,y,score");
  double last_bnb = 0.0, last_nb = 0.0;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    const auto c1 = line.find(','), c2 = line.rfind(',');
    const std::string curve = line.substr(0, c1);
    const double score = std::stod(line.substr(c2 + 1));
    if (curve == "bnb-alpha-5") {
      last_bnb = score;
      CHECK(score <= 5.0 + 1.0);  // never exceeds alpha + 1
    }
    if (curve == "nb") last_nb = score;
  }
  CHECK(rows == 3 * 201);
  // at y far above the mean the bnb score has flattened near its plateau
  // while the nb score keeps growing linearly
  CHECK(last_bnb < 5.0);
  CHECK(last_nb > 50.0);
  CHECK_THROWS_AS(score_curve_csv(10.0, 10.0, {0.5}, 10), input_error);
  CHECK_THROWS_AS(score_curve_csv(-1.0, 10.0, {3.0}, 10), input_error);
}
