// Runs the donation_ca binary as a subprocess.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "donation_ca/io.hpp"

namespace fs = std::filesystem;
using donation_ca::io::read_file;

namespace {

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" DONATION_CA_CLI "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("donation_ca_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, RunWritesThreeFilesDeterministically) {
  ASSERT_EQ(run_cli("run --rule RBA:both --n 50 --steps 50 --seed 7 --out " + path("a")), 0);
  ASSERT_EQ(run_cli("run --rule RBA:both --n 50 --steps 50 --seed 7 --out " + path("b")), 0);
  for (const auto* suffix : {".pbm", ".metrics.csv"}) {
    EXPECT_EQ(read_file(path("a") + suffix), read_file(path("b") + suffix)) << suffix;
  }
  EXPECT_EQ(read_file(path("a.pbm")).substr(0, 9), "P1\n50 51\n");
  EXPECT_TRUE(fs::exists(path("a.meta.json")));
}

TEST_F(CliTest, MetaJsonReexecutesToIdenticalOutputs) {
  ASSERT_EQ(run_cli("run --rule FS:both:h --n 40 --steps 30 --swap 3 --er 0.1 --seed 5 --out " + path("a")), 0);
  ASSERT_EQ(run_cli("run --config " + path("a.meta.json") + " --out " + path("b")), 0);
  EXPECT_EQ(read_file(path("a.pbm")), read_file(path("b.pbm")));
  EXPECT_EQ(read_file(path("a.metrics.csv")), read_file(path("b.metrics.csv")));
}

TEST_F(CliTest, FlagsOverrideConfigFile) {
  ASSERT_EQ(run_cli("run --rule IGB:both --n 20 --steps 5 --out " + path("a")), 0);
  ASSERT_EQ(run_cli("run --config " + path("a.meta.json") + " --steps 9 --out " + path("b")), 0);
  EXPECT_EQ(read_file(path("b.pbm")).substr(0, 9), "P1\n20 10\n");
}

TEST_F(CliTest, InitFileAndFatigueDefault) {
  {
    auto out = donation_ca::io::open_output(path("init.txt"));
    out << "0010000\n";
  }
  ASSERT_EQ(run_cli("run --raw-rule 90 --n 7 --steps 2 --init-file " + path("init.txt") + " --out " + path("a")), 0);
  EXPECT_EQ(read_file(path("a.pbm")), "P1\n7 3\n0010000\n0101000\n1000100\n");

  ASSERT_EQ(run_cli("run --rule ALT --n 6 --steps 8 --fatigue --out " + path("f")), 0);
  EXPECT_NE(read_file(path("f.meta.json")).find("\"fatigue\": 3"), std::string::npos);
}

TEST_F(CliTest, SweepIndependentOfWorkerCount) {
  const std::string args = "sweep --axis swap --values 0,4,8 --rules 72,50 --n 40 --steps 40 --replicates 5 --out ";
  ASSERT_EQ(run_cli(args + path("one"), "DONATION_CA_THREADS=1"), 0);
  ASSERT_EQ(run_cli(args + path("four"), "DONATION_CA_THREADS=4"), 0);
  EXPECT_EQ(read_file(path("one.csv")), read_file(path("four.csv")));
}

TEST_F(CliTest, EvolveAndImagescore) {
  ASSERT_EQ(run_cli("evolve --n 20 --generations 3 --gen-iters 10 --out " + path("e")), 0);
  EXPECT_TRUE(fs::exists(path("e.csv")));
  ASSERT_EQ(run_cli("imagescore --rounds 200 --replicates 2 --out " + path("i")), 0);
  EXPECT_TRUE(fs::exists(path("i.csv")));
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli("run --rule BOGUS:both --out " + path("x")), 2);
  EXPECT_EQ(run_cli("run --raw-rule 300 --out " + path("x")), 2);
  EXPECT_EQ(run_cli("run --n 2 --out " + path("x")), 2);
  EXPECT_EQ(run_cli("run --no-such-flag"), 2);
  EXPECT_EQ(run_cli("sweep --values '' --out " + path("x")), 2);
  EXPECT_EQ(run_cli("run --n 10 --steps 3 --out /nonexistent-dir/sub/x"), 1);
  EXPECT_EQ(run_cli(""), 2);
}
