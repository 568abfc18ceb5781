#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

fs::path scratch() {
  static fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("dynfpp_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  auto o = scratch() / "stdout", e = scratch() / "stderr";
  std::string cmd = std::string(DYNFPP_CLI) + " " + args + " >" + o.string() + " 2>" + e.string();
  int st = std::system(cmd.c_str());
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, slurp(o), slurp(e)};
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(Cli, ArmSummaryHasTheDocumentedFields) {
  auto r = run("arm --spec open1 --m 0 --n 1 --p 0.5 --samples 100000 --threads 4");
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  for (auto k : {"operation", "params", "estimate", "stderr", "n_samples", "seed", "status"}) EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["operation"], "arm");
  EXPECT_EQ(j["status"], "ok");
  EXPECT_EQ(j["n_samples"], 100000);
  double est = j["estimate"], se = j["stderr"];
  EXPECT_NEAR(est, 63.0 / 64, 3 * se);
  EXPECT_EQ(j["params"]["spec"], "open1");
}

TEST(Cli, ClassifyListsConclusions) {
  auto r = run("classify --f0 0.5 --ak constant:1");
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  auto text = j.dump();
  EXPECT_NE(text.find("hausdorff-dim-31/36"), std::string::npos);
  EXPECT_NE(text.find("upper-minkowski-31/36"), std::string::npos);
}

TEST(Cli, DynDimReportsSlope) {
  auto r = run("dyn-dim --dist bernoulli --n 5 --x 0 --s 1 --eps 2^-3..2^-9");
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_TRUE(j.contains("slope"));
  auto csv = run("dyn-dim --dist bernoulli --n 5 --x 0 --s 1 --eps 2^-3..2^-9 --format csv");
  EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), "eps,mean_N,stderr");
  EXPECT_EQ(std::count(csv.out.begin(), csv.out.end(), '\n'), 8);
}

TEST(Cli, ExitCodes) {
  auto bad = run("arm --bogus 1");
  EXPECT_EQ(bad.code, 2);
  auto j = json::parse(bad.err);
  EXPECT_EQ(j["status"], "error");
  EXPECT_EQ(j["exit_code"], 2);
  EXPECT_EQ(run("arm --p 2").code, 2);
  EXPECT_EQ(run("arm --m 3 --n 2").code, 2);
  EXPECT_EQ(run("growth --dist nonsense").code, 2);
  EXPECT_EQ(run("no-such-command").code, 2);
  auto big = run("crossing --n 100000 --p 0.5");
  EXPECT_EQ(big.code, 3);
  EXPECT_EQ(json::parse(big.err)["error"], "budget-exceeded");
}

TEST(Cli, UnresolvedIsNotAnError) {
  auto r = run("corrlen --p 0.501 --n-max 8 --samples 200");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["status"], "unresolved");
}

TEST(Cli, RerunIsByteIdentical) {
  auto a = scratch() / "a", b = scratch() / "b";
  std::string args = " crossing --n 8 --p 0.4,0.5,0.6 --samples 500 --seed 77 --threads 3 --out ";
  ASSERT_EQ(run(args + a.string()).code, 0);
  ASSERT_EQ(run(args + b.string() + " --threads 1").code, 0);
  EXPECT_EQ(slurp(a.string() + ".csv"), slurp(b.string() + ".csv"));
  auto ja = json::parse(slurp(a.string() + ".json"));
  EXPECT_EQ(ja["seed"], 77);
  EXPECT_EQ(ja["params"]["samples"], "500");
}

TEST(Cli, ConfigFileWithFlagOverrides) {
  auto cfg = scratch() / "run.cfg";
  write(cfg, "# recipe\nspec = open1\nn = 4\nsamples = 50\nseed = 9\n");
  auto r = run("arm --config " + cfg.string() + " --samples 60");
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_EQ(j["n_samples"], 60);
  EXPECT_EQ(j["seed"], 9);
  EXPECT_EQ(j["params"]["n"], "4");

  // the resolved params reproduce the run
  auto again = scratch() / "again.cfg";
  std::string text;
  for (auto& [k, v] : j["params"].items())
    if (k != "subcommand") text += k + "=" + v.get<std::string>() + "\n";
  write(again, text);
  auto r2 = run("arm --config " + again.string());
  ASSERT_EQ(r2.code, 0) << r2.err;
  EXPECT_EQ(json::parse(r2.out)["estimate"], j["estimate"]);

  auto bad = scratch() / "bad.cfg";
  write(bad, "spec=open1\nnot_a_key=3\n");
  EXPECT_EQ(run("arm --config " + bad.string()).code, 2);
  EXPECT_EQ(run("arm --config " + (scratch() / "missing.cfg").string()).code, 2);
}

TEST(Cli, CsvUsesTwelveSignificantDigits) {
  auto r = run("arm --spec open1 --n 4 --samples 3 --format csv");
  ASSERT_EQ(r.code, 0) << r.err;
  auto body = r.out.substr(r.out.find('\n') + 1);
  EXPECT_EQ(body.substr(0, body.find(',', body.find(',', body.find(',', body.find(',') + 1) + 1) + 1)), "open1,0,4,0.5");
  EXPECT_NE(body.find("0.666666666667"), std::string::npos);
  EXPECT_EQ(r.out.find('\r'), std::string::npos);
}
