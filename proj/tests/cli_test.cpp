#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Outcome {
  std::string out;
  int code = -1;
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(NILWORD_BIN) + " " + args + " 2>&1";
  Outcome r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string golden_path(const std::string& name) { return std::string(GOLDEN_DIR) + "/" + name + ".txt"; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Case {
  const char* name;
  const char* args;
  int code;
};

// Set NILWORD_UPDATE_GOLDEN=1 to rewrite the files after an intended change.
const Case kGolden[] = {
    {"canonicalize_chain", "canonicalize --p 3 --exp 2 '[x1,x2][x2,x3]^3'", 0},
    {"canonicalize_primitive", "canonicalize --p 3 'x1 x2'", 0},
    {"canonicalize_constant", "canonicalize --p 2 --exp 1 'x1^2'", 0},
    {"canonicalize_power_tail", "canonicalize --p 3 --exp 3 'x1^9 [x1,x2]^3'", 0},
    {"check_extraspecial", "check --jobs 1 --group extraspecial:3:1:+ --word '[x1,x2]'", 0},
    {"same_diverge", "same --jobs 1 --group heisenberg:3:1 x1 x1^3", 1},
    {"same_equal", "same --jobs 1 --group heisenberg:3:1 x1 x1^2", 0},
    {"group_special9", "group special9:3", 0},
    {"group_presentation", "group extraspecial:3:1:- --format presentation", 0},
    {"dist_csv", "dist --jobs 1 --group heisenberg:3:1 --format csv '[x1,x2]'", 0},
    {"dist_text", "dist --jobs 1 --group extraspecial:3:1:- 'x1^3'", 0},
    {"catalog", "catalog", 0},
};

}  // namespace

class Golden : public ::testing::TestWithParam<Case> {};

TEST_P(Golden, MatchesFile) {
  const Case& c = GetParam();
  Outcome r = run(c.args);
  EXPECT_EQ(r.code, c.code) << r.out;
  const char* update = std::getenv("NILWORD_UPDATE_GOLDEN");
  if (update && std::string(update) == "1") {
    std::ofstream(golden_path(c.name)) << r.out;
    return;
  }
  EXPECT_EQ(r.out, slurp(golden_path(c.name))) << c.args;
}

INSTANTIATE_TEST_SUITE_P(Cli, Golden, ::testing::ValuesIn(kGolden), [](const auto& info) { return std::string(info.param.name); });

TEST(Cli, CanonicalizeContent) {
  Outcome r = run("canonicalize --p 3 --exp 2 '[x1,x2][x2,x3]^3'");
  EXPECT_NE(r.out.find("t = (0, 1, 3)"), std::string::npos);
  EXPECT_NE(r.out.find("replay=PASS"), std::string::npos);
  EXPECT_NE(run("canonicalize --p 3 'x1 x2'").out.find("primitive: automorphic to x1"), std::string::npos);
  EXPECT_NE(run("canonicalize --p 2 --exp 1 'x1^2'").out.find("t = (0)"), std::string::npos);
}

TEST(Cli, CheckReportsExactBounds) {
  Outcome r = run("check --group extraspecial:3:1:+ --word '[x1,x2]'");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("8/27 >= 1/81 PASS"), std::string::npos);
  EXPECT_NE(r.out.find("8/27 >= 1/27 PASS"), std::string::npos);
  EXPECT_NE(r.out.find("8/27 >= 1/9 PASS"), std::string::npos);
}

TEST(Cli, GroupSpecial9) {
  Outcome r = run("group special9:3");
  EXPECT_NE(r.out.find("order: 19683"), std::string::npos);
  EXPECT_NE(r.out.find("|G'|: 243"), std::string::npos);
  EXPECT_NE(r.out.find("|G/G'|: 81"), std::string::npos);
  EXPECT_NE(r.out.find("|G/G'| < |G'|: true"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("canonicalize --p 3 'x1 ^^'").code, 2);
  EXPECT_EQ(run("canonicalize --p 4 x1").code, 3);
  EXPECT_EQ(run("canonicalize --p 3 --exp 0 x1").code, 3);
  EXPECT_EQ(run("dist --group nosuch:1 x1").code, 3);
  EXPECT_EQ(run("dist --group heisenberg:3:1 --k 1 '[x1,x2]'").code, 3);
  EXPECT_EQ(run("frobnicate").code, 3);
  Outcome b = run("dist --group heisenberg:3:2 --budget 1000 '[x1,x2]'");
  EXPECT_EQ(b.code, 4);
  EXPECT_NE(b.out.find("531441"), std::string::npos);
  EXPECT_EQ(run("verify-cert /nonexistent/cert.txt").code, 3);
}

TEST(Cli, BudgetFromEnvironment) {
  EXPECT_EQ(run("check --group heisenberg:3:1 --word '[x1,x2]'").code, 0);
  const std::string cmd = "NILWORD_BUDGET=10 " + std::string(NILWORD_BIN) + " check --group heisenberg:3:1 --word '[x1,x2]' >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 4);
}

TEST(Cli, SampledRunsAreReproducible) {
  const std::string args = "dist --group special9:3 --samples 2000 --seed 11 --format csv '[x1,x2]'";
  Outcome a = run(args), b = run(args);
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, run("dist --group special9:3 --samples 2000 --seed 12 --format csv '[x1,x2]'").out);
}

TEST(Cli, CertificateRoundTrip) {
  const std::string dir = ::testing::TempDir();
  const std::string report = dir + "/nilword_report.txt";
  ASSERT_EQ(run("canonicalize --p 3 --exp 2 'x1 x2 x1 x2 [x2,x3]^3' --out " + report).code, 0);
  Outcome v = run("verify-cert " + report + " --group extraspecial:3:1:-");
  EXPECT_EQ(v.code, 0) << v.out;
  EXPECT_NE(v.out.find("PASS"), std::string::npos);

  std::string text = slurp(report);
  const auto at = text.find("x1->x1^-4");
  ASSERT_NE(at, std::string::npos) << text;
  text.replace(at, 9, "x1->x1^3");
  const std::string bad = dir + "/nilword_bad.txt";
  std::ofstream(bad) << text;
  Outcome f = run("verify-cert " + bad);
  EXPECT_EQ(f.code, 1);
  EXPECT_NE(f.out.find("not a unit"), std::string::npos);
}

TEST(Cli, PresentationFileRoundTrip) {
  const std::string path = ::testing::TempDir() + "/nilword_group.txt";
  ASSERT_EQ(run("group special9:3 --format presentation --out " + path).code, 0);
  Outcome r = run("group file:" + path);
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("order: 19683"), std::string::npos);
}
