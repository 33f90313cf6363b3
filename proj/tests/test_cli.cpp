#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "qsl2r/modules.hpp"

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  nlohmann::json json() const { return nlohmann::json::parse(out); }
};

CliRun run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + (env.empty() ? "" : " ") + QSL2R_CLI + std::string(" ") + args + " 2>/dev/null";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::vector<double> values(const nlohmann::json& j) {
  std::vector<double> v;
  for (const auto& e : j["eigenvalues"]) v.push_back(e["value"].get<double>());
  return v;
}

}  // namespace

TEST(Cli, VerifyDefaultPasses) {
  CliRun r = run("verify");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("all checks passed"), std::string::npos);
}

TEST(Cli, VerifyCorruptedPodlesFails) {
  CliRun r = run("verify --presentation podles --corrupt --format json");
  EXPECT_EQ(r.code, 1);
  nlohmann::json j = r.json();
  EXPECT_FALSE(j["ok"].get<bool>());
  EXPECT_NE(j["first_failure"].get<std::string>().find("PODLES"), std::string::npos);
}

TEST(Cli, VerifyOrthogonalityDegreeTwo) {
  CliRun r = run("verify --max-degree 2 --format json");
  EXPECT_EQ(r.code, 0);
  nlohmann::json j = r.json();
  ASSERT_EQ(j["sections"].size(), 1u);
  const auto& lines = j["sections"][0]["lines"];
  int monomials = 0;
  for (const auto& l : lines)
    if (l.get<std::string>().find("coideal orthogonality for") != std::string::npos) ++monomials;
  EXPECT_EQ(monomials, 9);  // 1, X, Y, Z, XX, XZ, YY, YZ, ZZ
}

TEST(Cli, VerifyLoadsDump) {
  std::string path = ::testing::TempDir() + "qsl2r_podles.txt";
  CliRun d = run("verify --dump podles -o " + path);
  ASSERT_EQ(d.code, 0);
  EXPECT_EQ(run("verify --load " + path).code, 0);
  std::ofstream(path) << "name BAD\ngenerators a\nweights 1\n[rules]\na -> \n";
  EXPECT_EQ(run("verify --load " + path).code, 2);
}

TEST(Cli, SpectrumExamples) {
  CliRun r = run("spectrum --spin 1 --q 0.5 --a 0");
  ASSERT_EQ(r.code, 0);
  auto v = values(r.json());
  ASSERT_EQ(v.size(), 3u);
  EXPECT_NEAR(v[0], -2.5, 1e-12);
  EXPECT_NEAR(v[1], 0, 1e-12);
  EXPECT_NEAR(v[2], 2.5, 1e-12);

  r = run("spectrum --spin 0 --q 0.7 --a 0.3");
  ASSERT_EQ(r.code, 0);
  v = values(r.json());
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NEAR(v[0], qsl2r::qnumber(0.7, 0.3), 1e-14);

  r = run("spectrum --spin 2 --q 0.6 --a 0.25");
  ASSERT_EQ(r.code, 0);
  v = values(r.json());
  ASSERT_EQ(v.size(), 5u);
  for (int p = 0; p <= 4; ++p) EXPECT_NEAR(v[4 - p], qsl2r::qnumber(0.6, 0.25 + 4 - 2 * p), 1e-10);
}

TEST(Cli, SphericalNeedsIntegerSpin) {
  CliRun r = run("spherical --spin 1 --q 0.5 --a 0.3");
  ASSERT_EQ(r.code, 0);
  EXPECT_LT(r.json()["residual"].get<double>(), 1e-9);
  EXPECT_EQ(run("spherical --spin 1/2 --q 0.5 --a 0.3").code, 2);
}

TEST(Cli, ClassifySectors) {
  CliRun r = run("classify --q 0.5 --a 0");
  ASSERT_EQ(r.code, 0);
  int one_dim_even = 0;
  nlohmann::json j = r.json();
  for (const auto& e : j["entries"])
    if (e["sector"] == "even" && e["support"] == "finite") ++one_dim_even;
  EXPECT_EQ(one_dim_even, 2);

  r = run("classify --q 0.5 --a 0.5");
  ASSERT_EQ(r.code, 0);
  bool c_odd = false, c_even = false;
  j = r.json();
  for (const auto& e : j["entries"])
    if (e["family"] == "C") (e["sector"] == "odd" ? c_odd : c_even) = true;
  EXPECT_TRUE(c_odd);
  EXPECT_FALSE(c_even);
}

TEST(Cli, ClassifyJsonRoundTrips) {
  CliRun r = run("classify --q 0.5 --a 0.25 --nmax 5");
  ASSERT_EQ(r.code, 0);
  nlohmann::json j = r.json();
  auto es = qsl2r::classification_from_json(j);
  EXPECT_EQ(qsl2r::classification_json(0.5, 0.25, es), j);
}

TEST(Cli, ScanBoundaries) {
  CliRun r = run("scan --q 0.5 --a 0 --b 0 --lambda-grid -4:4:801");
  ASSERT_EQ(r.code, 0);
  nlohmann::json j = r.json();
  const auto& b = j["scans"][0]["boundaries"];
  ASSERT_EQ(b.size(), 2u);
  EXPECT_NEAR(b[0]["lambda"].get<double>(), -2.5, 1e-9);
  EXPECT_NEAR(b[1]["lambda"].get<double>(), 2.5, 1e-9);
}

TEST(Cli, ScanOrderIsByLambdaThenB) {
  CliRun r = run("scan --q 0.5 --a 0.3 --b 2.3 --b 0.3 --lambda-grid -3:3:31 --format csv");
  ASSERT_EQ(r.code, 0);
  std::istringstream is(r.out);
  std::string line;
  std::getline(is, line);
  double pl = -1e9, pb = -1e9;
  int rows = 0;
  while (std::getline(is, line)) {
    double l = std::stod(line), b = std::stod(line.substr(line.find(',') + 1));
    EXPECT_TRUE(l > pl || (l == pl && b > pb)) << line;
    pl = l;
    pb = b;
    ++rows;
  }
  EXPECT_EQ(rows, 62);
}

TEST(Cli, ModuleAndFiniteDim) {
  CliRun r = run("module --q 0.5 --a 0.3 --lambda 0.7 --b 0.1 --window 12");
  ASSERT_EQ(r.code, 0);
  EXPECT_LT(r.json()["residuals"]["gram_diag"].get<double>(), 1e-10);
  r = run("module --q 0.5 --a 0 --lambda qang:1 --b 0 --window 2 --format csv");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "c,r_c,iX_lo,iX_mid,iX_hi,Z_lo,Z_mid,Z_hi,iY_lo,iY_mid,iY_hi,iB");
  r = run("finite-dim --q 0.5 --a 0 --N 2");
  ASSERT_EQ(r.code, 0);
  nlohmann::json j = r.json();
  const auto& ms = j["modules"];
  ASSERT_EQ(ms.size(), 2u);
  EXPECT_NEAR(ms[0]["entry"]["lambda"].get<double>(), 4.25, 1e-15);
  EXPECT_NEAR(ms[1]["entry"]["lambda"].get<double>(), -4.25, 1e-15);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("bogus").code, 2);
  EXPECT_EQ(run("spectrum --spin 1 --q 1.5").code, 2);
  EXPECT_EQ(run("scan --lambda-grid 1:2").code, 2);
  EXPECT_EQ(run("scan --lambda-grid 1:2:0").code, 2);
  EXPECT_EQ(run("module --lambda qang:").code, 2);
  EXPECT_EQ(run("module --window 0").code, 2);
  EXPECT_EQ(run("verify --presentation nope").code, 2);
  EXPECT_EQ(run("classify --format xml").code, 2);
  EXPECT_EQ(run("classify", "QSL2R_TOL=-1").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, ToleranceFromEnvironment) {
  // A tolerance below rounding level turns residual checks into failures.
  EXPECT_EQ(run("module --q 0.5 --a 0.3 --lambda 0.7 --b 0.1", "QSL2R_TOL=1e-30").code, 1);
  EXPECT_EQ(run("module --q 0.5 --a 0.3 --lambda 0.7 --b 0.1 --tol 1e-9", "QSL2R_TOL=1e-30").code, 0);
}
