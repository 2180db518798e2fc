#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hipose/bench.hpp"
#include "hipose/encoding.hpp"
#include "hipose/solver.hpp"
#include <nlohmann/json.hpp>
#include "test_util.hpp"

using namespace hipose;

namespace {

struct CliResult {
  int code;
  std::string out;
};

CliResult run(const std::string& args, const test::TempDir& dir) {
  const auto out = dir / "stdout.txt";
  const std::string cmd = std::string("cd '") + dir.path().string() + "' && HIPOSE_THREADS= '" +
                          HIPOSE_CLI_PATH + "' --log-level quiet " + args + " > '" + out.string() +
                          "' 2> '" + (dir / "stderr.txt").string() + "'";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out);
  std::stringstream s;
  s << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, s.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new test::TempDir("cli");
    ASSERT_EQ(run("encode --mesh builtin:box --bits 12 --out box.hsenc", *dir_).code, 0);
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static test::TempDir* dir_;
};

test::TempDir* Cli::dir_ = nullptr;

}  // namespace

TEST_F(Cli, EncodeCube) {
  const CliResult r = run("encode --mesh '" + test::data_path("cube10.ply").string() + "' --bits 10 --seed 0 --out c.hsenc",
                    *dir_);
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("N=1024"), std::string::npos) << r.out;
  EXPECT_EQ(load_encoding(*dir_ / "c.hsenc").size(), 1024u);
}

TEST_F(Cli, EncodeErrors) {
  EXPECT_EQ(run("encode --mesh nope.ply --bits 10 --out x.hsenc", *dir_).code, 1);
  EXPECT_EQ(run("encode --mesh builtin:box --bits 0 --out x.hsenc", *dir_).code, 1);
  EXPECT_EQ(run("encode --mesh '" + test::data_path("bad_face.ply").string() + "' --out x.hsenc", *dir_).code, 1);
  EXPECT_EQ(run("encode --mesh '" + test::data_path("planar.obj").string() + "' --bits 4 --out x.hsenc", *dir_).code,
            2);
  // 8 vertices cannot be encoded with 2 bits.
  EXPECT_EQ(run("encode --mesh '" + test::data_path("cube10.ply").string() + "' --bits 2 --out x.hsenc", *dir_).code,
            2);
  EXPECT_EQ(run("encode --mesh builtin:box --bogus", *dir_).code, 1);
  EXPECT_EQ(run("", *dir_).code, 1);
  EXPECT_EQ(run("encode --mesh builtin:box --out no/such/dir/x.hsenc", *dir_).code, 1);
}

TEST_F(Cli, NoiseFreeSolve) {
  ASSERT_EQ(run("generate --encoding box.hsenc --noise-free --seed 4 --out nf.jsonl --truth nf.json", *dir_).code, 0);
  const CliResult r = run("solve --encoding box.hsenc --corrs nf.jsonl --truth nf.json --report nf_report.json", *dir_);
  ASSERT_EQ(r.code, 0);
  const auto doc = nlohmann::json::parse(slurp(*dir_ / "nf_report.json"));
  EXPECT_LT(doc["truth"]["rotation_error_rad"].get<double>(), 1e-8);
  EXPECT_LT(doc["truth"]["translation_error_mm"].get<double>(), 1e-6);
}

TEST_F(Cli, SeededRansacIsRepeatable) {
  ASSERT_EQ(run("generate --encoding box.hsenc --seed 5 --outliers 0.2 --out s.jsonl --truth s.json", *dir_).code, 0);
  ASSERT_EQ(run("solve --encoding box.hsenc --corrs s.jsonl --solver ransac --seed 7 --report r1.json", *dir_).code, 0);
  ASSERT_EQ(run("solve --encoding box.hsenc --corrs s.jsonl --solver ransac --seed 7 --report r2.json", *dir_).code, 0);
  EXPECT_EQ(slurp(*dir_ / "r1.json"), slurp(*dir_ / "r2.json"));
  const auto report = report_from_json(slurp(*dir_ / "r1.json"));
  EXPECT_EQ(report.solver, "ransac");
}

TEST_F(Cli, SolveErrors) {
  EXPECT_EQ(run("solve --encoding box.hsenc --corrs '" + test::data_path("not_json.jsonl").string() + "'", *dir_).code,
            1);
  EXPECT_EQ(run("solve --encoding box.hsenc --corrs missing.jsonl", *dir_).code, 1);
  ASSERT_EQ(run("generate --encoding box.hsenc --noise-free --points 4 --out tiny.jsonl --truth tiny.json", *dir_).code,
            0);
  EXPECT_EQ(run("solve --encoding box.hsenc --corrs tiny.jsonl --m-default 4", *dir_).code, 0);
  std::ofstream(*dir_ / "strict.toml") << "[solver]\nmin_inliers = 5\n";
  EXPECT_EQ(run("solve --encoding box.hsenc --corrs tiny.jsonl --config strict.toml", *dir_).code, 3);
  std::ofstream(*dir_ / "broken.hsenc") << "HSENC";
  EXPECT_EQ(run("solve --encoding broken.hsenc --corrs tiny.jsonl", *dir_).code, 2);
}

TEST_F(Cli, ConfigOverridesFlags) {
  ASSERT_EQ(run("generate --encoding box.hsenc --seed 6 --outliers 0.2 --out o.jsonl --truth o.json", *dir_).code, 0);
  std::ofstream(*dir_ / "plain.toml") << "[solver]\nname = \"plain\"\n";
  ASSERT_EQ(run("solve --encoding box.hsenc --corrs o.jsonl --solver ransac --config plain.toml --report p.json",
                *dir_).code,
            0);
  EXPECT_EQ(report_from_json(slurp(*dir_ / "p.json")).solver, "plain");
}

TEST_F(Cli, BenchThreadsAgree) {
  const std::string base = "bench --preset table3 --seeds 3 --bits 12 --no-timing --out ";
  ASSERT_EQ(run("--threads 1 " + base + "t1.csv", *dir_).code, 0);
  const CliResult r8 = run("--threads 8 " + base + "t8.csv", *dir_);
  ASSERT_EQ(r8.code, 0);
  EXPECT_EQ(slurp(*dir_ / "t1.csv"), slurp(*dir_ / "t8.csv"));
  const std::string csv = slurp(*dir_ / "t1.csv");
  EXPECT_EQ(csv.rfind("solver,seed,add,add_s,auc,time_ms,iterations,final_inliers\n", 0), 0u);
  EXPECT_NE(r8.out.find("hierarchical"), std::string::npos);
}

TEST_F(Cli, BenchFig4Columns) {
  // A 12-bit encoding cannot host m_default up to 16.
  EXPECT_EQ(run("bench --preset fig4 --seeds 2 --encoding box.hsenc --out f.csv", *dir_).code, 2);
  ASSERT_EQ(run("bench --preset fig4 --seeds 2 --bits 16 --out f.csv", *dir_).code, 0);
  std::istringstream in(slurp(*dir_ / "f.csv"));
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(std::count(header.begin(), header.end(), ',') + 1, 12);
}

TEST_F(Cli, BenchAllFailedExitsNonZero) {
  std::ofstream(*dir_ / "fail.toml") << "[bench]\nseeds = 2\nsolvers = [\"hierarchical\"]\nbits = 12\n"
                                        "[scenario]\nn_points = 4\n[solver]\nmin_inliers = 5\n";
  EXPECT_EQ(run("bench --config fail.toml --out fail.csv", *dir_).code, 3);
}
