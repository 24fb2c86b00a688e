#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "bstlimit/error.hpp"
#include "bstlimit/experiment.hpp"

using namespace bstlimit;
using nlohmann::json;

namespace {

ErrorCode code_of(const std::string& text) {
  try {
    validate(parse_config(text));
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

ExperimentConfig small(const std::string& name) {
  ExperimentConfig c = default_config(name);
  if (name == "ipl-limit" || name == "wiener-limit" || name == "msil-limit") {
    c.n_values = {50, 200};
    c.replicates = 6;
    c.ray_grid = 16;
    c.truncation_depth = 20;
  } else if (name == "phase") {
    c.replicates = 4;
    c.truncation_depth = 20;
  } else if (name == "height-fill") {
    c.n_values = {2000};
    c.replicates = 5;
  } else if (name == "shape-law" || name == "tilted-law") {
    c.replicates = 2000;
  } else if (name == "dst-conditional") {
    c.n_values = {1, 3};
    c.replicates = 2000;
  }
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  for (const auto& name : experiment_names()) {
    const auto c = default_config(name);
    CHECK_NOTHROW(validate(c));
    const auto back = parse_config(config_to_json(c));
    CHECK(config_to_json(back) == config_to_json(c));
  }
  const auto c = parse_config(R"({"schema_version": 1, "experiment": "ipl-limit", "replicates": 3})");
  CHECK(c.replicates == 3);
  CHECK(c.n_values == default_config("ipl-limit").n_values);
  CHECK(c.csv_path == "ipl-limit.csv");

  const auto out = parse_config(
      R"({"schema_version": 1, "experiment": "constants", "output": {"csv": "a.csv", "manifest": "m.json"}})");
  CHECK(out.csv_path == "a.csv");
  CHECK(out.manifest_path == "m.json");

  CHECK(code_of(R"({"schema_version": 1, "experiment": "constants", "bogus": 1})") == ErrorCode::ConfigError);
  CHECK(code_of(R"({"schema_version": 1, "experiment": "constants", "output": {"tsv": "a"}})") ==
        ErrorCode::ConfigError);
  CHECK(code_of(R"({"schema_version": 2, "experiment": "constants"})") == ErrorCode::ConfigError);
  CHECK(code_of(R"({"schema_version": 1})") == ErrorCode::ConfigError);
  CHECK(code_of(R"({"schema_version": 1, "experiment": "nope"})") == ErrorCode::ConfigError);
  CHECK(code_of("{not json") == ErrorCode::ConfigError);
  CHECK(code_of(R"({"schema_version": 1, "experiment": "ipl-limit", "replicates": "ten"})") ==
        ErrorCode::ConfigError);
}

TEST_CASE("config validation") {
  auto bad = [](const std::string& name, auto mutate) {
    auto c = default_config(name);
    mutate(c);
    try {
      validate(c);
    } catch (const Error& e) {
      return e.code() == ErrorCode::ConfigError;
    }
    return false;
  };
  CHECK(bad("ipl-limit", [](auto& c) { c.workers = 0; }));
  CHECK(bad("ipl-limit", [](auto& c) { c.workers = 257; }));
  CHECK(bad("ipl-limit", [](auto& c) { c.truncation_depth = 63; }));
  CHECK(bad("ipl-limit", [](auto& c) { c.mass_floor = 1.0; }));
  CHECK(bad("ipl-limit", [](auto& c) { c.n_values = {0}; }));
  CHECK(bad("ipl-limit", [](auto& c) { c.n_values = {20000000}; }));
  CHECK(bad("msil-limit", [](auto& c) { c.ray_grid = 100; }));
  CHECK(bad("phase", [](auto& c) { c.rho = {0.5}; }));
  CHECK(bad("phase", [](auto& c) { c.alpha = {1.0}; }));
  CHECK(bad("phase", [](auto& c) { c.rho.clear(); }));
  CHECK(bad("tilted-law", [](auto& c) { c.z = {0.0}; }));
  CHECK(bad("tilted-law", [](auto& c) { c.z.clear(); }));
  CHECK(bad("shape-law", [](auto& c) { c.n_values = {9}; }));
  CHECK(bad("shape-law", [](auto& c) { c.replicates = 999; }));
  CHECK(bad("dst-conditional", [](auto& c) { c.n_values = {200000}; }));
}

TEST_CASE("runs are independent of the worker count") {
  for (const std::string name : {"ipl-limit", "msil-limit", "phase", "tilted-law", "dst-conditional"}) {
    CAPTURE(name);
    auto c = small(name);
    c.workers = 1;
    const auto serial = to_csv(run_experiment(c).rows);
    CHECK(serial == to_csv(run_experiment(c).rows));
    c.workers = 4;
    CHECK(serial == to_csv(run_experiment(c).rows));
    c.master_seed ^= 1;
    CHECK(serial != to_csv(run_experiment(c).rows));
  }
}

TEST_CASE("every experiment runs at small scale") {
  for (const auto& name : experiment_names()) {
    CAPTURE(name);
    const auto r = run_experiment(small(name));
    CHECK_FALSE(r.rows.empty());
    CHECK_FALSE(r.criteria.empty());
    for (const auto& row : r.rows) {
      CHECK(row.experiment == name);
      CHECK(row.replicate >= -1);
      CHECK(row.quantity.find(',') == std::string::npos);
      CHECK(row.node_or_ray.find(',') == std::string::npos);
    }
  }
}

TEST_CASE("csv and manifest outputs") {
  const auto dir = std::filesystem::temp_directory_path() / "bstlimit_test_experiment";
  std::filesystem::remove_all(dir);
  auto c = default_config("constants");
  c.csv_path = (dir / "sub" / "c.csv").string();
  c.manifest_path = (dir / "c.manifest.json").string();
  const auto r = run_and_write(c);
  CHECK(r.passed());

  std::ifstream csv(c.csv_path);
  std::string header;
  std::getline(csv, header);
  CHECK(header == "experiment,replicate,n,quantity,node_or_ray,value");

  std::ifstream mf(c.manifest_path);
  const json m = json::parse(mf);
  CHECK(m.at("artifact_version") == artifact_version());
  CHECK(m.at("mixer") == "splitmix64-counter/v1");
  CHECK(m.at("passed") == true);
  CHECK(m.at("criteria").size() == r.criteria.size());
  CHECK(m.at("config").at("experiment") == "constants");
  CHECK(m.at("rows") == r.rows.size());

  const auto text = to_csv({{"x", -1, 0, "q", "e", 0.1}});
  CHECK(text == "experiment,replicate,n,quantity,node_or_ray,value\nx,-1,0,q,e,0.10000000000000001\n");

  auto blocked = c;
  blocked.csv_path = (dir / "c.manifest.json" / "x.csv").string();
  CHECK_THROWS_AS((void)run_and_write(blocked), Error);
  std::filesystem::remove_all(dir);
}
