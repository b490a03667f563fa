#include <doctest.h>

#include "nashw/cli.hpp"
#include "nashw/io.hpp"
#include "nashw/kary.hpp"
#include "nashw/oracle.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

using namespace nashw;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() : dir(fs::temp_directory_path() / ("nashw_cli_test_" + std::to_string(::getpid()))) {
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  }
};

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const char* kTwoUnits = R"({"weights":[1,1],"profile":{"kind":"identical","values":[1,1]}})";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("check output") {
    Scratch s;
    const auto inst = s.write("inst.json", kTwoUnits);
    const auto unfair = s.write("unfair.json", R"({"bundles":[[],[0,1]]})");
    const auto fair = s.write("fair.json", R"({"bundles":[[0],[1]]})");
    const auto r1 = run({"check", inst, unfair});
    CHECK(r1.code == 0);
    CHECK(r1.out.find("violations: [(1,2)]") != std::string::npos);
    CHECK(r1.out.find("nash_welfare: 0") != std::string::npos);
    const auto r2 = run({"check", inst, fair});
    CHECK(r2.out.find("violations: []") != std::string::npos);
    CHECK(r2.out.find("agent 1: value 1") != std::string::npos);
    const auto r3 = run({"check", inst, fair, "--json"});
    const auto doc = nlohmann::json::parse(r3.out);
    CHECK(doc["welfare"]["zero"] == false);
    CHECK(doc["violations"].empty());
  }

  TEST_CASE("exit codes") {
    Scratch s;
    const auto inst = s.write("inst.json", kTwoUnits);
    CHECK(run({"check", (s.dir / "missing.json").string(), inst}).code == cli::kInvalid);
    CHECK(run({"solve", s.write("bad.json", "{")}).code == cli::kInvalid);
    CHECK(run({"solve", s.write("zero.json", R"({"weights":[0],"profile":{"kind":"identical","values":[1]}})")}).code ==
          cli::kInvalid);
    CHECK(run({"check", inst, s.write("short.json", R"({"bundles":[[0],[]]})")}).code == cli::kInvalid);
    CHECK(run({"solve", inst, "--method", "fptas", "--epsilon", "2"}).code == cli::kInvalid);
    CHECK(run({"solve", inst, "--method", "nonsense"}).code == cli::kInvalid);
    CHECK(run({"frobnicate"}).code == cli::kInvalid);

    const auto many = s.write("many.json", R"({"weights":[1,2],"profile":{"kind":"identical","values":[1,2,3,4,5,6,7,8]}})");
    CHECK(run({"solve", many, "--method", "kary", "--budget", "5"}).code == cli::kBudget);
    CHECK(run({"solve", many, "--method", "pmean", "--p", "1"}).code == cli::kIncompatible);
    CHECK(run({"solve", many, "--method", "two-valuable"}).code == cli::kIncompatible);

    const auto frac = s.write("frac.json", R"({"weights":[1,1],"profile":{"kind":"additive","matrix":[["1/2",1],[1,1]]}})");
    const auto r = run({"solve", frac, "--method", "fptas"});
    CHECK(r.code != 0);
    CHECK(r.err.find("integer valuations required") != std::string::npos);
  }

  TEST_CASE("solve reports") {
    Scratch s;
    const auto inst = s.write("inst.json", R"({"weights":[1,1],"profile":{"kind":"identical","values":[2,1,1]}})");
    const auto kary = nlohmann::json::parse(run({"solve", inst, "--method", "kary"}).out);
    CHECK(kary["method"] == "kary");
    CHECK(kary["guarantee"] == "exact");
    CHECK(kary["welfare"]["linear"].get<double>() == doctest::Approx(2.0));

    const auto ptas = nlohmann::json::parse(run({"solve", inst, "--method", "ptas", "--epsilon", "0.8", "--repair"}).out);
    CHECK(ptas["repair"]["wwef1"] == true);
    CHECK(ptas["params"]["lambda"] == 12);

    const auto low = nlohmann::json::parse(run({"solve", inst, "--method", "ptas", "--lambda", "4"}).out);
    CHECK(low["guarantee"].get<std::string>().rfind("none", 0) == 0);

    const auto bottleneck = nlohmann::json::parse(run({"solve", inst, "--method", "pmean", "--p=-inf"}).out);
    CHECK(bottleneck["objective"]["p"] == "-inf");

    const auto autos = nlohmann::json::parse(run({"solve", inst}).out);
    CHECK(autos["method"] == "kary");

    const auto out = (s.dir / "report.json").string();
    CHECK(run({"solve", inst, "--out", out}).code == 0);
    CHECK(run({"check", inst, out}).code == 0);
  }

  TEST_CASE("p parsing") {
    CHECK(cli::parse_p("-inf") == kNegativeInfinity);
    CHECK(cli::parse_p("-infinity") == kNegativeInfinity);
    CHECK(cli::parse_p("-1") == -1.0);
    CHECK(cli::parse_p("0.5") == 0.5);
    CHECK_THROWS(cli::parse_p("minus one"));
  }

  TEST_CASE("generator") {
    for (const std::string kind : {"identical", "kary", "two-valuable", "additive"}) {
      const auto a = run({"gen", kind, "--n", "3", "--m", "5", "--seed", "42"});
      const auto b = run({"gen", kind, "--n", "3", "--m", "5", "--seed", "42"});
      CHECK(a.code == 0);
      CHECK(a.out == b.out);
      CHECK_NOTHROW(parse_instance(a.out));
    }
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const auto tv = cli::generate_instance({"two-valuable", 4, 5, seed, 10, 2});
      for (const auto& t : std::get<TwoValuable>(tv.profile()).tables) {
        CHECK(t.goods.size() <= 2);
        if (t.goods.size() == 2) CHECK(t.pair >= std::max(t.single[0], t.single[1]));
      }
      const auto k = cli::generate_instance({"kary", 3, 8, seed, 10, 2});
      std::set<Rational> distinct;
      for (const auto& v : k.identical_values()) {
        if (v > 0) distinct.insert(v);
      }
      CHECK(distinct.size() <= 2);
    }
    CHECK(run({"gen", "cubic", "--n", "2", "--m", "2"}).code == cli::kInvalid);
  }

  TEST_CASE("bench") {
    Scratch s;
    const auto empty = s.write("empty.json", R"({"entries":[]})");
    const auto r = run({"bench", empty});
    CHECK(r.code == 0);
    CHECK(r.out == "instance,method,params,welfare_log,oracle_log,ratio,ms,transfers\n");

    nlohmann::json suite = {{"entries", nlohmann::json::array()}};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto name = "k" + std::to_string(seed) + ".json";
      s.write(name, serialize_instance(cli::generate_instance({"kary", 3, 6, seed, 9, 2})));
      suite["entries"].push_back({{"instance", name}, {"methods", {"kary"}}});
      const auto aname = "a" + std::to_string(seed) + ".json";
      s.write(aname, serialize_instance(cli::generate_instance({"additive", 2, 5, seed, 8, 2})));
      suite["entries"].push_back({{"instance", aname}, {"methods", {"fptas"}}, {"params", {{"epsilon", 0.5}}}});
    }
    suite["entries"].push_back({{"instance", "missing.json"}, {"methods", {"kary"}}});
    const auto path = s.write("suite.json", suite.dump());
    const auto b = run({"bench", path});
    REQUIRE(b.code == 0);
    std::istringstream lines(b.out);
    std::string line;
    std::getline(lines, line);
    int rows = 0, failed = 0;
    while (std::getline(lines, line)) {
      ++rows;
      if (line.find("failed: ") != std::string::npos) {
        ++failed;
        continue;
      }
      std::vector<std::string> cells;
      std::stringstream ls(line);
      for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
      REQUIRE(cells.size() >= 6);
      const double ratio = std::stod(cells[5]);
      if (cells[1] == "kary") CHECK(ratio == doctest::Approx(1.0));
      if (cells[1] == "fptas") CHECK(ratio >= 0.5);
    }
    CHECK(rows == 21);
    CHECK(failed == 1);
  }
}
