#include "doctest.h"

#include "cli.hpp"

#include "threshold/errors.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using threshold::Exact;
using threshold::cli::run_cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// status column of a moments CSV, keyed by the c_tilde column text.
std::vector<std::pair<double, std::string>> statuses(const std::string& csv) {
  std::vector<std::pair<double, std::string>> out;
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) {
      cells.push_back(cell);
    }
    out.emplace_back(std::stod(cells.at(2)), cells.at(3));
  }
  return out;
}

}  // namespace

TEST_CASE("grid expansion") {
  using threshold::cli::expand_grid;
  const auto g = expand_grid("0:3:0.1");
  REQUIRE(g.size() == 30);
  CHECK(g.front() == 0);
  CHECK(g[20] == 2);
  CHECK(g.back() == Exact(29, 10));
  CHECK(expand_grid("1,1/2,0.25") == std::vector<Exact>{1, Exact(1, 2), Exact(1, 4)});
  CHECK(expand_grid("7/3") == std::vector<Exact>{Exact(7, 3)});
  CHECK_THROWS(expand_grid("0:1:0"));
  CHECK_THROWS(expand_grid("0:1"));
  CHECK_THROWS(expand_grid(""));
}

TEST_CASE("certify") {
  const auto a = run({"certify", "--family", "lower", "--c", "0", "--m", "2", "--d", "3"});
  CHECK(a.code == 0);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(j["exact"] == true);
  CHECK(j["numeric"]["max_relative_residual"].get<double>() < 1e-6);

  CHECK(run({"certify", "--family", "upper", "--c", "1", "--m", "0", "--d", "3", "--eps", "1"}).code == 0);

  const auto bad = run({"certify", "--c", "-1", "--m", "0", "--d", "3"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("c must be") != std::string::npos);
  CHECK(run({"certify", "--family", "upper", "--c", "1", "--m", "1", "--d", "3"}).code == 2);
  CHECK(run({"certify", "--family", "sideways"}).code == 2);
}

TEST_CASE("moments") {
  const auto a = run({"moments", "--alpha", "2", "--d", "3", "--ctilde", "0:3:0.1"});
  CHECK(a.code == 0);
  CHECK(a.out.rfind("alpha,d,c_tilde,status,value,note\n", 0) == 0);
  const auto rows = statuses(a.out);
  REQUIRE(rows.size() == 30);
  for (const auto& [ct, status] : rows) {
    CHECK(status == (ct < 2.0 - 1e-9 ? "finite" : "infinite"));
  }

  const auto lower = statuses(run({"moments", "--family", "lower", "--c", "1", "--m", "1", "--d", "3", "--ctilde", "1"}).out);
  REQUIRE(lower.size() == 1);
  CHECK(lower[0].second == "infinite");
  const auto upper = statuses(
      run({"moments", "--family", "upper", "--c", "1", "--m", "1", "--d", "3", "--eps", "0.5", "--ctilde", "1"}).out);
  REQUIRE(upper.size() == 1);
  CHECK(upper[0].second == "finite");

  CHECK(run({"moments", "--alpha", "2", "--d", "3", "--ctilde", "0:3"}).code == 2);
  CHECK(run({"moments", "--alpha", "2", "--d", "3", "--ctilde", "-1"}).code == 2);
  CHECK(run({"moments", "--alpha", "2", "--d", "3"}).code == 2);
}

TEST_CASE("classify") {
  const auto a = run({"classify", "--tail", "3/4 * r^(-2)", "--c", "0", "--d", "3"});
  CHECK(a.code == 0);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(j["absence"]["verdict"] == "absence_applies");
  CHECK(j["absence"]["matched_m"] == 0);

  const auto b = run({"classify", "--tail", "7/4 * r^(-2)", "--c", "0", "--d", "3", "--assert-critical"});
  CHECK(b.code == 0);
  const auto k = nlohmann::json::parse(b.out);
  CHECK(k["existence"]["verdict"] == "existence_applies");
  CHECK(k["existence"]["matched_eps"] == "1");

  const auto bad = run({"classify", "--tail", "7/4 * q^(-2)", "--c", "0", "--d", "3"});
  CHECK(bad.code == 2);
  CHECK_FALSE(bad.err.empty());
}

TEST_CASE("shoot and probe") {
  const auto s = run({"shoot", "--alpha", "1", "--d", "3", "--from", "1", "--to", "100"});
  CHECK(s.code == 0);
  CHECK(nlohmann::json::parse(s.out)["max_relative_deviation"].get<double>() < 1e-6);

  const auto p = run({"probe", "--alpha", "1", "--d", "3", "--lambdas", "1,0.1,0.01,0.001", "--format", "json"});
  CHECK(p.code == 0);
  CHECK(nlohmann::json::parse(p.out)["verdict"] == "critical_consistent");

  const auto q = run({"probe", "--alpha", "-1", "--d", "3", "--lambdas", "0.001", "--format", "json"});
  CHECK(nlohmann::json::parse(q.out)["verdict"] == "subcritical_consistent");

  CHECK(run({"probe", "--alpha", "1", "--d", "3", "--lambdas", "0.1,1"}).code == 2);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"classify", "--c"}).code == 2);
  const auto help = run({"--help"});
  CHECK(help.code == 0);
}

TEST_CASE("config file merging") {
  const std::filesystem::path cfg = "classify_test.cfg";
  {
    std::ofstream f(cfg);
    f << "# defaults\ntail = 7/4 * r^(-2)\nc = 1\nd = 3\n";
  }
  const auto from_file = run({"classify", "--config", cfg.string(), "--format", "json"});
  CHECK(from_file.code == 0);
  CHECK(nlohmann::json::parse(from_file.out)["c"] == "1");
  const auto overridden = run({"classify", "--config", cfg.string(), "--c", "0", "--format", "json"});
  CHECK(nlohmann::json::parse(overridden.out)["c"] == "0");
  std::filesystem::remove(cfg);
  CHECK(run({"classify", "--config", "missing.cfg"}).code == 2);
}

TEST_CASE("output files are all-or-nothing") {
  const std::filesystem::path target = "moments_out.csv";
  std::filesystem::remove(target);
  const auto ok = run({"moments", "--alpha", "2", "--d", "3", "--ctilde", "0,1", "--output", target.string()});
  CHECK(ok.code == 0);
  CHECK(ok.out.empty());
  CHECK(slurp(target).rfind("alpha,d,c_tilde", 0) == 0);
  std::filesystem::remove(target);

  const std::filesystem::path failed = "never_written.json";
  const auto bad = run({"classify", "--tail", "nonsense", "--output", failed.string()});
  CHECK(bad.code == 2);
  CHECK_FALSE(std::filesystem::exists(failed));
  CHECK_FALSE(std::filesystem::exists("never_written.json.partial"));
}

TEST_CASE("identical flags give identical bytes") {
  const std::vector<std::string> args{"classify", "--tail", "15/4 * r^(-2) + 2 * r^(-2) * log1^(-1)",
                                      "--c", "2", "--d", "3", "--seed", "11"};
  CHECK(run(args).out == run(args).out);
  const std::vector<std::string> sweep{"moments", "--alpha", "3/2", "--d", "3", "--ctilde", "0:2:0.25"};
  CHECK(run(sweep).out == run(sweep).out);
}
