#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run(const std::string& args) {
  std::string cmd = std::string(DQLAB_BIN) + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

json slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return json::parse(in);
}

// wall_time fields are the one permitted difference between replays
void strip_wall_time(json& j) {
  if (j.is_object()) {
    j.erase("wall_time_ms");
    for (auto& [k, v] : j.items()) strip_wall_time(v);
  } else if (j.is_array()) {
    for (auto& v : j) strip_wall_time(v);
  }
}

struct TempDir {
  fs::path path;
  TempDir(const std::string& tag) : path(fs::temp_directory_path() / ("dqlab_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("olimpico command: exit code, report shape, determinism") {
  TempDir dir("oli");
  std::string base = "olimpico --count 2000 --seed 99 --out " + dir.path.string();
  CHECK(run(base) == 0);
  json rep = slurp(dir.path / "olimpico.json");
  CHECK(rep["pass"] == true);
  CHECK(rep["min_margin"].get<double>() >= 0.0);
  CHECK(rep["equality_family_exact_zero"] == true);
  CHECK(rep["schema_version"] == 1);
  CHECK(fs::exists(dir.path / "olimpico.csv"));

  // replay determinism modulo wall time
  TempDir dir2("oli2");
  CHECK(run("olimpico --count 2000 --seed 99 --out " + dir2.path.string()) == 0);
  json a = slurp(dir.path / "olimpico.json");
  json b = slurp(dir2.path / "olimpico.json");
  strip_wall_time(a);
  strip_wall_time(b);
  CHECK(a == b);
}

TEST_CASE("gamma command with presets") {
  TempDir dir("gamma");
  CHECK(run("gamma --preset heaviside --mus 10 50 --out " + dir.path.string()) == 0);
  json rep = slurp(dir.path / "gamma.json");
  CHECK(rep["pass"] == true);

  CHECK(run("gamma --preset constant --mus 10 --out " + dir.path.string()) == 0);
  CHECK(run("gamma --preset bogus --out " + dir.path.string()) != 0);
}

TEST_CASE("heaviside command (shortened schedule)") {
  TempDir dir("heavi");
  CHECK(run("heaviside --eps-hi 18 --out " + dir.path.string()) == 0);
  json rep = slurp(dir.path / "heaviside.json");
  CHECK(rep["pass"] == true);
  bool saw_finite = false, saw_divergent = false;
  for (const auto& row : rep["table"]) {
    if (row["result"]["kind"] == "finite") saw_finite = true;
    if (row["result"]["kind"] == "divergent") saw_divergent = true;
  }
  CHECK(saw_finite);
  CHECK(saw_divergent);
}

TEST_CASE("locvsglob command (small run)") {
  TempDir dir("lvg");
  CHECK(run("locvsglob --ells 0.5 --randomized 2 --seed 3 --out " + dir.path.string()) == 0);
  json rep = slurp(dir.path / "locvsglob.json");
  CHECK(rep["pass"] == true);
  CHECK(fs::exists(dir.path / "locvsglob.csv"));
}

TEST_CASE("counterexample command (small run) and the violating preset") {
  TempDir dir("cex");
  CHECK(run("counterexample --jmax 5 --samples 40 --out " + dir.path.string()) == 0);
  json rep = slurp(dir.path / "counterexample.json");
  CHECK(rep["pass"] == true);
  CHECK(rep["partial_sum"]["monotone"] == true);
  CHECK(rep["partial_sum"]["dominated"] == true);

  // CSV trace has the documented columns
  std::ifstream csv(dir.path / "counterexample.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "j,S_j,B_j,tail_bound");

  // the under-growing preset must surface condition failures (exit 1)
  CHECK(run("counterexample --jmax 4 --samples 10 --preset small --out " +
            dir.path.string()) == 1);
  json bad = slurp(dir.path / "counterexample.json");
  CHECK(bad["pass"] == false);
  CHECK(bad["sequence_conditions"]["all_ok"] == false);
}

TEST_CASE("config file supplies defaults, flags override") {
  TempDir dir("cfg");
  fs::path cfg_path = dir.path / "config.json";
  {
    std::ofstream out(cfg_path);
    out << R"({"schema_version":1,"seed":7,"out":")" << dir.path.string()
        << R"(","olimpico":{"count":1500,"m_max":4}})";
  }
  CHECK(run("olimpico --config " + cfg_path.string()) == 0);
  json rep = slurp(dir.path / "olimpico.json");
  CHECK(rep["seed"] == 7);
  CHECK(rep["params"]["count"] == 1500);

  // explicit flag beats the config value
  CHECK(run("olimpico --config " + cfg_path.string() + " --count 800") == 0);
  json rep2 = slurp(dir.path / "olimpico.json");
  CHECK(rep2["params"]["count"] == 800);
}

TEST_CASE("usage errors exit with code 2 (or CLI11's parse code)") {
  CHECK(run("") != 0);
  CHECK(run("counterexample --jmax 40") != 0);
  TempDir dir("seed");
  // exact-arithmetic results do not move with the seed
  CHECK(run("counterexample --jmax 4 --samples 25 --seed 1 --out " + dir.path.string()) == 0);
  json a = slurp(dir.path / "counterexample.json");
  CHECK(run("counterexample --jmax 4 --samples 25 --seed 2 --out " + dir.path.string()) == 0);
  json b = slurp(dir.path / "counterexample.json");
  CHECK(a["partial_sum"]["rows"] == b["partial_sum"]["rows"]);
  CHECK(a["quotient_bounds"][0]["violations"] == b["quotient_bounds"][0]["violations"]);
}
