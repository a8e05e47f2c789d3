#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "sigradar/config.hpp"
#include "sigradar/error.hpp"
#include "sigradar/io.hpp"

using namespace sigradar;
namespace fs = std::filesystem;

namespace {

int run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "sigradar");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  // keep tables and progress lines out of the test log
  std::ostringstream sink;
  auto* old = std::cout.rdbuf(sink.rdbuf());
  const int code = cli::run(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old);
  return code;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  os << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

const char* kSmall =
    "seed = 7\n"
    "synth.n_assets = 6\n"
    "synth.n_markets = 3\n"
    "synth.n_quarters = 6\n"
    "synth.days_per_quarter = 40\n"
    "synth.loading_max = 0.3\n"
    "synth.noise_sd = 0.002\n"
    "radar.algorithms = ols,lasso\n"
    "radar.min_train_rows = 30\n"
    "hp.lasso.alpha = 0.0001\n"
    "portfolio.fraction = 0.2\n";

}  // namespace

TEST_CASE("config parsing") {
  const ConfigFile f = ConfigFile::parse("# comment\nseed = 3  # trailing\nradar.lags=2\nx = a b\n", "/tmp/base");
  CHECK(f.integer("seed", 0) == 3);
  CHECK(f.integer("radar.lags", 4) == 2);
  CHECK(f.text("x", "") == "a b");
  CHECK(f.number("missing", 1.5) == 1.5);
  CHECK_NOTHROW(f.reject_unknown());
  const ConfigFile g = ConfigFile::parse("seed = 1\ntypo.key = 2\n");
  g.integer("seed", 0);
  CHECK_THROWS_WITH_AS(g.reject_unknown(), "unknown config key: typo.key", ValidationError);

  CHECK_THROWS_AS(ConfigFile::parse("seed = 1\nseed = 2\n"), ValidationError);
  CHECK_THROWS_AS(ConfigFile::parse("no equals sign\n"), ValidationError);
  CHECK_THROWS_AS(ConfigFile::parse("x = 1.5z\n").number("x", 0), ValidationError);
  CHECK_THROWS_AS(ConfigFile::parse("x = maybe\n").flag("x", false), ValidationError);
  CHECK(ConfigFile::parse("x = 1, 2,3\n").numbers("x") == std::vector<double>{1, 2, 3});
  CHECK(*ConfigFile::parse("p = data/r.csv\n", "/cfg").path("p") == fs::path("/cfg/data/r.csv"));
  CHECK(*ConfigFile::parse("p = /abs/r.csv\n", "/cfg").path("p") == fs::path("/abs/r.csv"));
  CHECK_THROWS_AS(ConfigFile::load("/nonexistent/sigradar.cfg"), MissingInputError);
}

TEST_CASE("run config") {
  const ConfigFile f = ConfigFile::parse(
      "radar.algorithms = lasso,gb\nhp.gb.max_depth = 3\nradar.first_forecast_quarter = 2011Q2\n"
      "portfolio.weighting = equal\ntune.space.lasso.alpha = 0.001, 0.01\n");
  const RunConfig rc = run_config_from(f);
  CHECK(rc.radar.algorithms == std::vector<Algorithm>{Algorithm::lasso, Algorithm::gradient_boosting});
  CHECK(std::get<BoostingParams>(rc.radar.hyperparameters.at(Algorithm::gradient_boosting)).max_depth == 3);
  CHECK(*rc.radar.first_forecast_quarter == Quarter{2011, 2});
  CHECK(rc.tune.spaces.at(Algorithm::lasso).at("alpha") == std::vector<double>{0.001, 0.01});
  CHECK_NOTHROW(f.reject_unknown());

  CHECK_THROWS_AS(run_config_from(ConfigFile::parse("hp.lasso.depth = 1\n")), ValidationError);
  CHECK_THROWS_AS(run_config_from(ConfigFile::parse("portfolio.weighting = value\n")), ValidationError);
  CHECK_THROWS_AS(run_config_from(ConfigFile::parse("portfolio.fraction = 0.7\n")), ValidationError);
  CHECK_THROWS_AS(run_config_from(ConfigFile::parse("radar.algorithms = svm\n")), ValidationError);
  CHECK_THROWS_AS(run_config_from(ConfigFile::parse("radar.threads = 0\n")), ValidationError);

  const ScenarioSpec s = scenario_from(ConfigFile::parse("synth.decay = linear\nsynth.lags = 3\nsynth.regime.2 = 0.5\n"));
  CHECK(s.profile.size() == 3);
  CHECK(s.regime_breaks.at(2) == 0.5);
  CHECK_THROWS_AS(scenario_from(ConfigFile::parse("synth.decay = cubic\n")), ValidationError);

  // tuned output feeds back into a run config
  const std::string hp = hyperparameter_text({{Algorithm::lasso, LassoParams{0.002}}});
  const RunConfig back = run_config_from(ConfigFile::parse(hp));
  CHECK(std::get<LassoParams>(back.radar.hyperparameters.at(Algorithm::lasso)).alpha == doctest::Approx(0.002));
}

TEST_CASE("thread count precedence") {
  CHECK(cli::resolve_threads(3u, "5", 2) == 3);
  CHECK(cli::resolve_threads(std::nullopt, "5", 2) == 5);
  CHECK(cli::resolve_threads(std::nullopt, nullptr, 2) == 2);
  CHECK(cli::resolve_threads(std::nullopt, "", 2) == 2);
  CHECK_THROWS_AS(cli::resolve_threads(std::nullopt, "0", 2), ValidationError);
  CHECK_THROWS_AS(cli::resolve_threads(std::nullopt, "four", 2), ValidationError);
  CHECK_THROWS_AS(cli::resolve_threads(0u, nullptr, 2), ValidationError);
}

TEST_CASE("exit codes") {
  const fs::path dir = fresh_dir("sigradar_cli_exit");
  CHECK(run_args({"radar", "--out", dir.string()}) == 2);  // no returns.csv
  CHECK(run_args({"radar", "--config", (dir / "absent.cfg").string()}) == 2);
  write(dir / "bad.cfg", "radar.nonsense = 1\n");
  CHECK(run_args({"synth", "--config", (dir / "bad.cfg").string(), "--out", dir.string()}) == 1);
  CHECK(run_args({"synth", "--bogus-flag"}) == 1);
  CHECK(run_args({}) == 1);
  write(dir / "forecasts.csv", "");
  CHECK(run_args({"report", "--out", dir.string()}) != 0);
}

TEST_CASE("synth, radar, tune and report end to end") {
  const fs::path dir = fresh_dir("sigradar_cli_e2e");
  write(dir / "run.cfg", kSmall);
  const std::string cfg = (dir / "run.cfg").string();
  REQUIRE(run_args({"synth", "--config", cfg, "--out", dir.string()}) == 0);
  for (const char* f : {"returns.csv", "markets.csv", "calendar.csv", "caps.csv", "factors.csv", "rf.csv"})
    CHECK(fs::exists(dir / f));

  REQUIRE(run_args({"radar", "--config", cfg, "--out", dir.string(), "--threads", "2"}) == 0);
  const auto forecasts = io::read_forecasts(dir / "forecasts.csv");
  // 6 quarters with 4-quarter windows leave Q5 and Q6 to forecast
  CHECK(forecasts.size() == 6u * 2u * 40u * 2u);
  CHECK(fs::exists(dir / "importance.csv"));
  CHECK(fs::exists(dir / "run_report.txt"));

  REQUIRE(run_args({"report", "--config", cfg, "--out", dir.string()}) == 0);
  const std::string report = slurp(dir / "report.txt");
  CHECK(report.find("Long-short portfolios, top minus bottom") != std::string::npos);
  CHECK(report.find("Six-factor alpha") != std::string::npos);
  CHECK(report.find("Out-of-sample R2 by stock-quarter") != std::string::npos);
  CHECK(report.find("Signal importance (x1e4) on lagged week") != std::string::npos);
  CHECK(report.find("Bottom-up market timing") != std::string::npos);
  CHECK(slurp(dir / "portfolio.csv").find("combined_long_short") != std::string::npos);

  // tuning must end before evaluation starts
  write(dir / "tune.cfg", std::string(kSmall) + "radar.first_forecast_quarter = 2011Q2\ntune.n_tasks = 2\n"
                                                "tune.trials_per_task = 2\ntune.space.lasso.alpha = 0.001\n");
  REQUIRE(run_args({"tune", "--config", (dir / "tune.cfg").string(), "--out", dir.string(), "--algos", "lasso"}) == 0);
  CHECK(slurp(dir / "tuned.cfg").find("hp.lasso.alpha") != std::string::npos);
  write(dir / "late.cfg", std::string(kSmall) + "radar.first_forecast_quarter = 2011Q2\ntune.last_quarter = 2011Q2\n");
  CHECK(run_args({"tune", "--config", (dir / "late.cfg").string(), "--out", dir.string()}) == 1);
}

TEST_CASE("installed binary") {
  const fs::path dir = fresh_dir("sigradar_cli_bin");
  write(dir / "run.cfg", kSmall);
  const std::string bin = SIGRADAR_CLI_PATH;
  const std::string quiet = " > /dev/null 2>&1";
  CHECK(std::system((bin + " synth --config " + (dir / "run.cfg").string() + " --out " + dir.string() + quiet).c_str()) == 0);
  CHECK(fs::exists(dir / "returns.csv"));
  const int missing = std::system((bin + " report --out " + (dir / "nowhere").string() + quiet).c_str());
  CHECK(WEXITSTATUS(missing) == 2);
}
