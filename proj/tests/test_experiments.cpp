#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "adiabat/error.hpp"
#include "adiabat/experiments.hpp"

using namespace adiabat;
using nlohmann::json;

namespace {

std::string config_message(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config);
    return e.what();
  }
  FAIL("config was accepted: " << text);
  return {};
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* small_multi_packet =
    R"({"experiment": "multi-packet", "seed": 3, "N": [15], "beta": [50], "n_samples": 48,
        "packets": 2, "sampler": {"pilot_sweeps": 100, "burn_in_sweeps": 200}})";

}  // namespace

TEST_CASE("catalog lists every experiment once and covers the criteria") {
  const auto& cat = experiment_catalog();
  CHECK(cat.size() == 8);
  std::set<std::string> names;
  std::set<int> criteria;
  for (const auto& e : cat) {
    names.insert(e.name);
    for (int c : e.criteria) CHECK(criteria.insert(c).second);
    CHECK_FALSE(e.columns.empty());
    CHECK_FALSE(e.description.empty());
  }
  CHECK(names.size() == cat.size());
  CHECK(criteria == std::set<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  CHECK_THROWS_AS(experiment_info("nope"), Error);
}

TEST_CASE("schema file documents exactly the catalog columns") {
  const json schema = json::parse(read_file(ADIABAT_SCHEMA_FILE));
  const auto& exps = schema.at("experiments");
  CHECK(exps.size() == experiment_catalog().size());
  for (const auto& e : experiment_catalog()) {
    INFO(e.name);
    REQUIRE(exps.contains(e.name));
    const auto& cols = exps.at(e.name).at("columns");
    std::vector<std::string> documented;
    for (auto it = cols.begin(); it != cols.end(); ++it) documented.push_back(it.key());
    CHECK(std::set<std::string>(documented.begin(), documented.end()) ==
          std::set<std::string>(e.columns.begin(), e.columns.end()));
    CHECK(documented.size() == e.columns.size());
  }
}

TEST_CASE("defaults are filled in and echoed") {
  const auto c = parse_config(R"({"experiment": "chebyshev", "seed": 9})");
  CHECK(c.seed == 9);
  CHECK(c.n_list == std::vector<int>{127});
  CHECK(c.beta_list == std::vector<double>{50.0, 100.0, 200.0});
  CHECK(c.n_samples == 4000);
  CHECK(c.exponent_a == 0.4);
  CHECK(c.echo.at("profile").at("kind") == "bump");
  CHECK(c.echo.at("sampler").at("chains") == 8);
  CHECK_FALSE(c.echo.contains("grid_sizes"));
  // The echo parses back to the same configuration.
  const auto again = parse_config(c.echo.dump());
  CHECK(again.echo == c.echo);
}

TEST_CASE("explicit fields override defaults") {
  const auto c = parse_config(R"({
    "experiment": "autocorrelation", "seed": 2, "N": [31], "beta": [20, 40],
    "persistence_beta": 40, "profile": {"kind": "cosine", "offset": 1, "amplitude": 0.5, "wavenumber": 2},
    "sampler": {"stride": 4, "pilot_sweeps": 0, "chains": 2}, "t_grid": [0, 1, 2.5]})");
  CHECK(c.n_list == std::vector<int>{31});
  CHECK(c.persistence_beta == 40.0);
  CHECK(c.profile.describe() == NuProfile::cosine(1.0, 0.5, 2.0).describe());
  CHECK(c.sampler.stride == 4);
  CHECK(c.sampler.chains == 2);
  CHECK(c.t_grid.size() == 3);
}

TEST_CASE("config errors name the problem") {
  CHECK(contains(config_message(R"({"experiment": "homological"})"), "seed"));
  CHECK(contains(config_message(R"({"experiment": "homological", "seed": -1})"), "seed"));
  CHECK(contains(config_message(R"({"experiment": "homological", "seed": 1.5})"), "seed"));
  CHECK(contains(config_message(R"({"seed": 1})"), "experiment"));
  CHECK(contains(config_message(R"({"experiment": "warp-drive", "seed": 1})"), "warp-drive"));

  const auto unknown = config_message(R"({"experiment": "homological", "seed": 1, "nsamples": 5})");
  CHECK(contains(unknown, "nsamples"));
  CHECK(contains(unknown, "n_samples"));
  CHECK(contains(config_message(R"({"experiment": "theorem2-h1", "seed": 1, "beta": [1]})"), "beta"));

  CHECK(contains(config_message(R"({"experiment": "homological", "seed": 1, "N": [2]})"), "N[0]"));
  CHECK(contains(config_message(R"({"experiment": "homological", "seed": 1, "N": []})"), "N"));
  CHECK(contains(config_message(R"({"experiment": "chebyshev", "seed": 1, "beta": [0]})"), "beta"));
  CHECK(contains(config_message(R"({"experiment": "chebyshev", "seed": 1, "exponent_a": 0.8})"), "exponent_a"));
  CHECK(contains(config_message(R"({"experiment": "ratio-scaling", "seed": 1, "beta": [1, 2]})"), "beta"));
  CHECK(contains(config_message(R"({"experiment": "autocorrelation", "seed": 1, "persistence_beta": 7})"),
                 "persistence_beta"));
  CHECK(contains(config_message(R"({"experiment": "autocorrelation", "seed": 1, "t_grid": [1, 2]})"), "t_grid"));
  CHECK(contains(config_message(R"({"experiment": "multi-packet", "seed": 1, "packets": 99})"), "packets"));
  CHECK(contains(config_message(R"({"experiment": "lemma3-scan", "seed": 1, "functions": ["H2"]})"), "H2"));
  CHECK(contains(config_message(R"({"experiment": "chebyshev", "seed": 1, "sampler": {"pilot_sweeps": 5}})"),
                 "pilot_sweeps"));
  CHECK(contains(config_message(R"({"experiment": "chebyshev", "seed": 1, "sampler": {"thin": 5}})"), "thin"));
  CHECK(contains(config_message(R"({"experiment": "chebyshev", "seed": 1, "profile": {"kind": "gauss"}})"),
                 "gauss"));
  CHECK(contains(config_message(R"({"experiment": "chebyshev", "seed": 1, "profile": {"kind": "bump", "center": 0.5}})"),
                 "half_width"));
  CHECK(contains(config_message("[1, 2]"), "object"));
}

TEST_CASE("syntax errors report line and column") {
  const auto msg = config_message("{\n  \"experiment\": \"homological\",\n  \"seed\": 1,,\n}");
  CHECK(contains(msg, "line 3"));
  CHECK(contains(msg, "column"));
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), Error);
}

TEST_CASE("profiles round-trip through JSON") {
  for (const auto& p : {NuProfile::constant(2.0), NuProfile::polynomial({1.0, 0.0, -0.5}),
                        NuProfile::cosine(0.0, 1.0, 0.5), NuProfile::bump(0.3, 0.2, 1.5)}) {
    CHECK(profile_from_json(profile_to_json(p)).describe() == p.describe());
  }
  CHECK_THROWS_AS(profile_from_json(json{{"kind", "bump"}, {"center", 0.5}, {"half_width", -1.0}, {"amplitude", 1.0}}),
                  Error);
}

TEST_CASE("number formatting") {
  CHECK(format_number(3.0) == "3");
  CHECK(format_number(-12.0) == "-12");
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(-INFINITY) == "-inf");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_number(1e20) == "1e+20");
}

TEST_CASE("csv table and summary text") {
  CsvTable t{{"a", "b"}, {{"1", "x"}, {"2", "y"}}};
  CHECK(t.to_string() == "a,b\n1,x\n2,y\n");

  ExperimentResult r;
  r.experiment = "demo";
  r.checks = {{"first", 3, true, "ok"}, {"second", 0, false, "too big"}};
  CHECK_FALSE(r.passed());
  REQUIRE(r.first_failure() != nullptr);
  CHECK(r.first_failure()->name == "second");
  const auto s = summary_text(r);
  CHECK(contains(s, "PASS first [criterion 3]: ok\n"));
  CHECK(contains(s, "FAIL second: too big\n"));
  CHECK(contains(s, "RESULT: FAIL (first failing check: second)"));
  r.checks.pop_back();
  CHECK(contains(summary_text(r), "RESULT: PASS"));
}

TEST_CASE("a small run is reproducible across repeats and thread counts") {
  const auto c = parse_config(small_multi_packet);
  const auto a = run_experiment(c, 1);
  const auto b = run_experiment(c, 1);
  const auto d = run_experiment(c, 3);
  CHECK(a.table.columns == experiment_info("multi-packet").columns);
  CHECK_FALSE(a.table.rows.empty());
  CHECK(a.table.to_string() == b.table.to_string());
  CHECK(a.table.to_string() == d.table.to_string());

  auto other = c;
  other.seed = 4;
  CHECK(run_experiment(other, 1).table.to_string() != a.table.to_string());
}

TEST_CASE("outputs are written to the requested directory") {
  const auto c = parse_config(R"({"experiment": "theorem2-h1", "seed": 1, "grid_sizes": [128, 256],
                                  "divergence_grids": [64, 512]})");
  const auto r = run_experiment(c);
  const auto dir = std::filesystem::temp_directory_path() / "adiabat_test_outputs";
  std::filesystem::remove_all(dir);
  write_outputs(c, r, dir, 0.25);
  const auto csv = read_file(dir / "results.csv");
  CHECK(csv == r.table.to_string());
  const auto meta = json::parse(read_file(dir / "metadata.json"));
  CHECK(meta.at("config") == c.echo);
  CHECK(meta.at("passed") == r.passed());
  CHECK(meta.at("wall_time_seconds") == 0.25);
  CHECK(meta.at("checks").size() == r.checks.size());
  CHECK(meta.at("build").contains("version"));
  CHECK(read_file(dir / "summary.txt") == summary_text(r));
  std::filesystem::remove_all(dir);
}

TEST_CASE("homological experiment passes at reduced size") {
  const auto c = parse_config(R"({"experiment": "homological", "seed": 5, "N": [15], "beta": [50],
                                  "n_samples": 20, "energy_N": 31, "energy_states": 2, "t_final": 100,
                                  "sampler": {"pilot_sweeps": 100}})");
  const auto r = run_experiment(c);
  for (const auto& check : r.checks) {
    INFO(check.name << ": " << check.detail);
    CHECK(check.passed);
  }
}
