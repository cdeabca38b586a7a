#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dnns/cli.h"
#include "dnns/delay_matrix.h"

namespace dnns {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "dnns");
  std::ostringstream o, e;
  int code = run_cli(args, o, e);
  return {code, o.str(), e.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dnns_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string tiny_config() const {
    const std::string p = path("tiny.cfg");
    std::ofstream f(p);
    f << "# small campaign\nn = 80\nservers = 30\ntrials = 1\nqueries = 20\nwarmup = 120\n"
         "vivaldi_rounds = 50\nalgorithms = hybridnn,coordnn\n";
    return p;
  }

  fs::path dir_;
};

TEST_F(CliTest, MissingMatrixFails) {
  auto r = cli({"analyze", "--matrix", path("absent.txt"), "--out", path("o")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("cannot read matrix file"), std::string::npos);
  auto none = cli({"analyze", "--out", path("o")});
  EXPECT_EQ(none.code, 1);
}

TEST_F(CliTest, BadKeyIsNamed) {
  auto r = cli({"simulate", "--set", "bogus_key=3", "--out", path("o")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bogus_key"), std::string::npos);
  auto b = cli({"simulate", "--set", "beta=1.5", "--out", path("o")});
  EXPECT_EQ(b.code, 1);
  EXPECT_NE(b.err.find("beta"), std::string::npos);
}

TEST_F(CliTest, UnknownSubcommandOrKind) {
  EXPECT_NE(cli({}).code, 0);
  EXPECT_NE(cli({"frobnicate"}).code, 0);
  auto g = cli({"gen", "--kind", "spherical", "--out", path("m.txt")});
  EXPECT_EQ(g.code, 1);
  EXPECT_FALSE(g.err.empty());
}

TEST_F(CliTest, GenIsDeterministic) {
  ASSERT_EQ(cli({"gen", "--kind", "euclidean", "--n", "100", "--seed", "1", "--out", path("a.txt")}).code, 0);
  ASSERT_EQ(cli({"gen", "--kind", "euclidean", "--n", "100", "--seed", "1", "--out", path("b.txt")}).code, 0);
  EXPECT_EQ(slurp(path("a.txt")), slurp(path("b.txt")));
  ASSERT_EQ(cli({"gen", "--kind", "euclidean", "--n", "100", "--seed", "2", "--out", path("c.txt")}).code, 0);
  EXPECT_NE(slurp(path("a.txt")), slurp(path("c.txt")));
  EXPECT_EQ(load_matrix(path("a.txt"), MatrixFormat::kKingText).size(), 100u);
}

TEST_F(CliTest, GenAsymmetricReloads) {
  ASSERT_EQ(cli({"gen", "--kind", "asymmetric", "--n", "50", "--asym", "0.5", "--format", "csv", "--out",
                 path("asym.csv")})
                .code,
            0);
  auto m = load_matrix(path("asym.csv"), MatrixFormat::kCsv);
  EXPECT_EQ(m.size(), 50u);
  EXPECT_FALSE(m.symmetric());
}

TEST_F(CliTest, AnalyzeWritesOutputs) {
  ASSERT_EQ(cli({"gen", "--kind", "euclidean", "--n", "60", "--noise", "0", "--out", path("m.txt")}).code, 0);
  auto r = cli({"analyze", "--matrix", path("m.txt"), "--out", path("an"), "--rho", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"rho.csv", "growth.csv", "alpha.csv", "ring_occupancy.csv", "samples_table.csv"}) {
    std::string text = slurp(fs::path(path("an")) / f);
    ASSERT_EQ(text.rfind("# seed=", 0), 0u) << f;
  }
  std::string rho = slurp(fs::path(path("an")) / "rho.csv");
  auto pos = rho.find("\n100,");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_LE(std::stod(rho.substr(pos + 5)), 2.0 + 1e-9);
  std::string samples = slurp(fs::path(path("an")) / "samples_table.csv");
  EXPECT_NE(samples.find("\n3.000,1.000,1.000,27\n"), std::string::npos) << samples;
}

TEST_F(CliTest, SweepProducesOneRowPerValue) {
  auto r = cli({"simulate", "--config", tiny_config(), "--set", "algorithms=hybridnn", "--sweep", "tau=2,4,6,8",
                "--out", path("sw")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string csv = slurp(fs::path(path("sw")) / "sweep.csv");
  std::size_t rows = 0;
  std::istringstream in(csv);
  bool header = false;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    ++rows;
  }
  EXPECT_EQ(rows, 4u);
  EXPECT_TRUE(fs::exists(fs::path(path("sw")) / "tau_2" / "summary.csv"));
}

TEST_F(CliTest, CompareIsDeterministic) {
  const std::string cfg = tiny_config();
  ASSERT_EQ(cli({"compare", "--configs", cfg, "--out", path("c1")}).code, 0);
  ASSERT_EQ(cli({"compare", "--configs", cfg, "--out", path("c2")}).code, 0);
  EXPECT_EQ(slurp(fs::path(path("c1")) / "compare.csv"), slurp(fs::path(path("c2")) / "compare.csv"));
  EXPECT_EQ(slurp(fs::path(path("c1")) / "tiny" / "records_hybridnn_t0.csv"),
            slurp(fs::path(path("c2")) / "tiny" / "records_hybridnn_t0.csv"));
}

}  // namespace
}  // namespace dnns
