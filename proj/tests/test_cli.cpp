#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "maxseq/cli.hpp"
#include "maxseq/config.hpp"
#include "maxseq/dgp.hpp"
#include "maxseq/panel_io.hpp"

using namespace maxseq;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "maxseq");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("maxseq_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

const char* kPanelConfig = R"(# unit-root null panel
experiment = "size_power"
seed = 42
n_grid = [200]
reps = 40

[dgp]
model = "panel"
n = 300
k = 6
phi = 1.0

[test]
type = "unitroot"
rule = "power:1:0.25"
reps = 300
m_steps = 200
)";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("panel CSV parsing") {
    const PanelData p = parse_panel_csv("a,b\n1,2\n3,4\n5,6\n7,8\n");
    CHECK(p.n() == 4);
    CHECK(p.k() == 2);
    CHECK(p.labels() == std::vector<std::string>{"a", "b"});
    CHECK(p.at(3, 1) == 8.0);
    CHECK(parse_panel_csv("x\r\n1\r\n2\r\n").n() == 2);
    CHECK_THROWS_WITH_AS(parse_panel_csv("a,b\n"), "empty input", ValidationError);
    CHECK_THROWS_WITH_AS(parse_panel_csv(""), "empty input", ValidationError);
    CHECK_THROWS_WITH_AS(parse_panel_csv("a,b\n1,2\n3\n"), "malformed CSV row 3", ValidationError);
    CHECK_THROWS_WITH_AS(parse_panel_csv("a,b\n1,2\n3,x\n"), "parse error at (3,2)", ValidationError);
    CHECK_THROWS_WITH_AS(parse_panel_csv("a,b\n1,NaN\n3,4\n"), "parse error at (2,2)", ValidationError);
    CHECK_THROWS_WITH_AS(parse_panel_csv("a,b\n1,inf\n3,4\n"), "parse error at (2,2)", ValidationError);
  }

  TEST_CASE("panel CSV round trip is exact") {
    PanelSpec spec;
    spec.n = 250;
    spec.k = 4;
    spec.phis = {1.0, 0.3, -0.7, 0.999};
    spec.errors.dist = ErrorDist::student_t;
    const PanelData p = simulate_ar1_panel(spec, RngSeed{6});
    CHECK(parse_panel_csv(format_panel_csv(p)) == p);
    const PanelData tiny = PanelData::from_columns({{1e-300, -5e-324, 1.0 / 3.0}, {1e300, 0.1, -0.0}});
    CHECK(parse_panel_csv(format_panel_csv(tiny)) == tiny);
  }

  TEST_CASE("config parsing") {
    const ExperimentConfig c = parse_experiment_config(kPanelConfig);
    CHECK(c.kind == ExperimentKind::size_power);
    CHECK(c.seed.master == 42);
    CHECK(c.n_grid == std::vector<std::size_t>{200});
    CHECK(c.simulate_n == 300u);
    REQUIRE(c.dgps.size() == 1);
    CHECK(std::get<PanelSpec>(c.dgps[0].model).k == 6);
    CHECK(c.test_reps == 300);

    const std::string cells = R"(
experiment = "size_power"
n_grid = [100, 200]
[dgp.null]
k = 3
[dgp.alt]
k = 3
phi = [0.9, 1, 1]
)";
    const ExperimentConfig m = parse_experiment_config(cells);
    REQUIRE(m.dgps.size() == 2);
    CHECK(m.dgps[0].label == "alt");
    CHECK(std::get<PanelSpec>(m.dgps[0].model).phis == std::vector<double>{0.9, 1, 1});

    CHECK_THROWS_WITH_AS(parse_experiment_config("n_grid=[10]\nbogus = 1\n[dgp]\n"), "unknown config key 'bogus'",
                         ValidationError);
    CHECK_THROWS_WITH_AS(parse_experiment_config("n_grid=[10]\n[dgp]\nk = two\n"),
                         "expected a number for 'dgp.k', got 'two'", ValidationError);
    CHECK_THROWS_AS(parse_experiment_config("n_grid=[10]\n[dgp]\nphi = 1.5\n"), ValidationError);
    CHECK_THROWS_AS(parse_experiment_config("n_grid=[20, 10]\n[dgp]\n"), ValidationError);
    CHECK_THROWS_AS(parse_experiment_config("n_grid=[10]\n"), ValidationError);
    CHECK_THROWS_AS(parse_experiment_config("n_grid=[10]\n[dgp]\nmodel=\"arp\"\ncoeffs=[1.0]\n"), ValidationError);
    CHECK_THROWS_AS(parse_experiment_config("n_grid=[10]\n[dgp]\n[extra]\n"), ValidationError);
    CHECK(parse_experiment_config("experiment=\"calibrate\"\nn_grid=[10]\n[dgp]\n[test]\ntolerance=inf\n").tolerance ==
          std::numeric_limits<double>::infinity());
  }

  TEST_CASE("simulate then unitroot writes the JSON contract") {
    TempDir dir;
    write_text_file(dir.file("exp.toml"), kPanelConfig);
    CliRun sim = cli({"simulate", "--config", dir.file("exp.toml"), "--out", dir.file("panel.csv")});
    REQUIRE(sim.code == 0);
    const PanelData p = load_panel_csv(dir.file("panel.csv"));
    CHECK(p.n() == 300);
    CHECK(p.k() == 6);

    const std::vector<std::string> args{"unitroot", "--in",   dir.file("panel.csv"), "--rule", "power:1:0.25",
                                        "--level",  "0.05",   "--reps",              "500",    "--m-steps",
                                        "300",      "--seed", "42",                  "--out",  dir.file("r.json")};
    CliRun r = cli(args);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("unitroot: stat=") == 0);
    const std::string first = read_text_file(dir.file("r.json"));
    const auto j = nlohmann::json::parse(first);
    for (const char* key : {"schema_version", "stat", "L", "critical_value", "p_value", "reject", "per_series"}) {
      CHECK(j.contains(key));
    }
    CHECK(j["schema_version"] == 1);
    CHECK(j["L"] == 4);
    CHECK(j["per_series"].size() == 6);
    CHECK(j["reject"].get<bool>() == (j["p_value"].get<double>() < 0.05));

    auto threaded = args;
    threaded.insert(threaded.end(), {"--threads", "3"});
    REQUIRE(cli(threaded).code == 0);
    CHECK(read_text_file(dir.file("r.json")) == first);
  }

  TEST_CASE("whitenoise subcommand") {
    TempDir dir;
    const std::vector<double> y = simulate_arp(ArpSpec{0.0, {0.0}, {}}, 400, RngSeed{3});
    save_panel_csv(PanelData::from_columns({y, y}), dir.file("series.csv"));
    const std::vector<std::string> args{"whitenoise", "--in", dir.file("series.csv"), "--p",   "1",
                                        "--L",        "10",   "--block",             "auto", "--reps",
                                        "500",        "--seed", "7",                 "--out", dir.file("w.json")};
    CliRun r = cli(args);
    REQUIRE(r.code == 0);
    const std::string first = read_text_file(dir.file("w.json"));
    const auto j = nlohmann::json::parse(first);
    CHECK(j["L"] == 10);
    CHECK(j["block_len"] == 7);
    CHECK(j["per_lag"].size() == 10);
    CHECK(j["p_value"].get<double>() > 0.0);
    REQUIRE(cli(args).code == 0);
    CHECK(read_text_file(dir.file("w.json")) == first);

    CHECK(cli({"whitenoise", "--in", dir.file("series.csv"), "--column", "y2", "--method", "gaussian"}).code == 0);
    CHECK(cli({"whitenoise", "--in", dir.file("series.csv"), "--column", "zz"}).code == 1);
    CHECK(cli({"whitenoise", "--in", dir.file("series.csv"), "--L", "200"}).code == 1);
    CHECK(cli({"whitenoise", "--in", dir.file("series.csv"), "--reps", "0"}).code == 1);
  }

  TEST_CASE("montecarlo reruns are byte identical") {
    TempDir dir;
    write_text_file(dir.file("exp.toml"), kPanelConfig);
    CliRun a = cli({"montecarlo", "--config", dir.file("exp.toml"), "--out", dir.file("a.csv"), "--json",
                    dir.file("a.json")});
    REQUIRE(a.code == 0);
    CliRun b = cli({"montecarlo", "--config", dir.file("exp.toml"), "--out", dir.file("b.csv"), "--threads", "4"});
    REQUIRE(b.code == 0);
    const std::string csv = read_text_file(dir.file("a.csv"));
    CHECK(csv == read_text_file(dir.file("b.csv")));
    CHECK(csv.find("size_power,dgp,200,3,40,rejection,") != std::string::npos);
    CHECK(nlohmann::json::parse(read_text_file(dir.file("a.json")))["rows"].size() == 2);
  }

  TEST_CASE("limits subcommand") {
    TempDir dir;
    CliRun r = cli({"limits", "--signed", "--reps", "500", "--m-steps", "200", "--seed", "1", "--out",
                    dir.file("l.json")});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(read_text_file(dir.file("l.json")));
    CHECK(j["law"] == "signed");
    CHECK(j["quantiles"].size() == 9);
  }

  TEST_CASE("exit codes") {
    TempDir dir;
    CliRun unknown = cli({"unitroot", "--in", "x.csv", "--bogus"});
    CHECK(unknown.code == 1);
    CHECK(unknown.err.find("Usage") != std::string::npos);
    CHECK(cli({}).code == 1);
    CHECK(cli({"frobnicate"}).code == 1);
    CHECK(cli({"unitroot", "--in", dir.file("missing.csv")}).code == 1);
    CHECK(cli({"--help"}).code == 0);

    write_text_file(dir.file("zero.csv"), "a,b\n0,0\n0,0\n0,0\n0,0\n0,0\n0,0\n");
    CliRun degenerate = cli({"unitroot", "--in", dir.file("zero.csv"), "--rule", "fixed:1", "--reps", "20",
                             "--m-steps", "100"});
    CHECK(degenerate.code == 2);
    CHECK(degenerate.err.find("degenerate") != std::string::npos);

    write_text_file(dir.file("bad.csv"), "a,b\n1,2\n3\n");
    CliRun bad = cli({"unitroot", "--in", dir.file("bad.csv")});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("malformed CSV row 3") != std::string::npos);
    CHECK(cli({"unitroot", "--in", dir.file("bad.csv"), "--rule", "cubic:1"}).code == 1);
  }

  TEST_CASE("installed binary runs") {
    const std::string cmd = std::string(MAXSEQ_CLI_PATH) + " --help > /dev/null";
    CHECK(std::system(cmd.c_str()) == 0);
  }
}
