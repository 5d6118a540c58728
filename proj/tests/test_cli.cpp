#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "invopt/cli.hpp"
#include "invopt/harness.hpp"

using namespace invopt;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "invopt");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "invopt_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("run writes both csv files") {
  const fs::path out = scratch("run.csv");
  fs::remove(out);
  fs::remove(scratch("run.agg.csv"));
  const Result r = cli({"run", "--family", "lp", "--d", "4", "--iters", "500", "--trials", "3",
                        "--methods", "psgd2,upa", "--seed", "42", "--out", out.string()});
  CHECK(r.code == kExitOk);
  CHECK(fs::exists(out));
  CHECK(fs::exists(scratch("run.agg.csv")));
  const WorstCaseTable t = read_csv(scratch("run.agg.csv").string());
  CHECK(t.rows.size() == 2 * 500);
}

TEST_CASE("no-timing output is byte stable") {
  const fs::path a = scratch("a.csv"), b = scratch("b.csv");
  const std::vector<std::string> base{"run", "--family", "scheduling", "--d", "3", "--iters",
                                      "50", "--trials", "2", "--methods", "psgd2,psgdp,rpa",
                                      "--no-timing", "--seed", "5"};
  auto args = base;
  args.insert(args.end(), {"--out", a.string()});
  REQUIRE(cli(args).code == kExitOk);
  args = base;
  args.insert(args.end(), {"--out", b.string()});
  REQUIRE(cli(args).code == kExitOk);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("validation errors exit with 1") {
  const Result chan = cli({"run", "--family", "scheduling", "--methods", "chan", "--out",
                           scratch("x.csv").string()});
  CHECK(chan.code == kExitInvalid);
  CHECK(chan.err.find("CHAN requires LP family") != std::string::npos);

  CHECK(cli({"run", "--bogus"}).code == kExitInvalid);
  CHECK(cli({}).code == kExitInvalid);
  CHECK(cli({"run", "--family", "milp", "--out", "x.csv"}).code == kExitInvalid);
  CHECK(cli({"run", "--family", "lp", "--methods", "sgd", "--out", "x.csv"}).code ==
        kExitInvalid);
  CHECK(cli({"run", "--family", "scheduling", "--d", "8", "--out", "x.csv"}).code ==
        kExitInvalid);
  CHECK(cli({"project", "--weights", "1,abc"}).code == kExitInvalid);
  CHECK(cli({"verify", "--family", "lp", "--d", "9"}).code == kExitInvalid);
  CHECK(cli({"run", "--family", "lp", "--d", "3", "--iters", "5", "--trials", "1", "--out",
             "/nonexistent-dir/x.csv"})
            .code == kExitInvalid);
}

TEST_CASE("project and solve-forward") {
  const Result p = cli({"project", "--weights", "0.4,0.1"});
  CHECK(p.code == kExitOk);
  CHECK(p.out == "0.65000000000000002,0.34999999999999998\n");

  const fs::path inst = scratch("inst.json");
  {
    std::ofstream f(inst);
    f << R"({"family":"scheduling","d":2,"r":[0,0],"p":[2,1]})";
  }
  const Result s = cli({"solve-forward", "--instance", inst.string(), "--weights", "0.5,0.5"});
  CHECK(s.code == kExitOk);
  CHECK(s.out == "-3,-1\n");
  CHECK(cli({"solve-forward", "--instance", inst.string(), "--weights", "1"}).code ==
        kExitInvalid);
  CHECK(cli({"solve-forward", "--instance", "/missing.json", "--weights", "1,0"}).code ==
        kExitInvalid);
}

TEST_CASE("binary: verify and unknown flag") {
  const char* bin = std::getenv("INVOPT_CLI");
  if (!bin) {
    MESSAGE("INVOPT_CLI not set; skipping binary checks");
    return;
  }
  const fs::path log = scratch("verify.txt");
  const std::string verify = std::string(bin) + " verify --family scheduling --d 3 --seed 7 > " +
                             log.string() + " 2>&1";
  const int rc = std::system(verify.c_str());
  CHECK(WEXITSTATUS(rc) == 0);
  const std::string report = slurp(log);
  for (const char* name : {"psi_rate", "lemma45", "lemma46", "descent", "finite_bound"}) {
    CHECK(report.find(std::string("PASS ") + name) != std::string::npos);
  }
  CHECK(report.find("worst_slack=") != std::string::npos);

  const std::string bad = std::string(bin) + " run --nope > " + log.string() + " 2>&1";
  CHECK(WEXITSTATUS(std::system(bad.c_str())) == 1);
  CHECK(slurp(log).find("nope") != std::string::npos);
}
