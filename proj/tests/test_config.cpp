#include <gtest/gtest.h>

#include "hipose/bench.hpp"
#include "hipose/error.hpp"
#include "hipose/solver.hpp"
#include "test_util.hpp"

using namespace hipose;

TEST(SolverSettings, Defaults) {
  const SolverSettings s = parse_solver_settings("");
  EXPECT_EQ(s.solver, "hierarchical");
  EXPECT_EQ(s.hierarchical.m_default, 10);
  EXPECT_DOUBLE_EQ(s.hierarchical.tau, 0.02);
  EXPECT_DOUBLE_EQ(s.hierarchical.beta, 2.0);
  EXPECT_EQ(s.ransac.iterations, 1000);
  EXPECT_EQ(s.ransac.sample_size, 10);
}

TEST(SolverSettings, FromFile) {
  const SolverSettings s = load_solver_settings(test::data_path("solver.toml"));
  EXPECT_EQ(s.hierarchical.m_default, 8);
  EXPECT_DOUBLE_EQ(s.hierarchical.tau, 0.05);
  EXPECT_DOUBLE_EQ(s.hierarchical.beta, 2.5);
  EXPECT_EQ(s.hierarchical.inlier_rule, InlierRule::mean);
  EXPECT_EQ(s.hierarchical.min_inliers, 6);
  EXPECT_EQ(s.ransac.iterations, 200);
  EXPECT_EQ(s.ransac.seed, 7u);
}

TEST(SolverSettings, Errors) {
  EXPECT_THROW(load_solver_settings(test::data_path("unknown_key.toml")), ParseError);
  EXPECT_THROW(parse_solver_settings("[solver]\nm_default = \"ten\"\n"), ParseError);
  EXPECT_THROW(parse_solver_settings("[solver]\nname = \"icp\"\n"), ParseError);
  EXPECT_THROW(parse_solver_settings("[solver]\ninlier_rule = \"mode\"\n"), ParseError);
  EXPECT_THROW(parse_solver_settings("[other]\nx = 1\n"), ParseError);
  EXPECT_THROW(parse_solver_settings("[solver\n"), ParseError);
  EXPECT_THROW(load_solver_settings(test::data_path("missing.toml")), ParseError);
}

TEST(BenchSettings, Parse) {
  const BenchSettings b = parse_bench_settings(R"(
[bench]
preset = "table3"
seeds = 7
first_seed = 100
threads = 2
solvers = ["plain", "hierarchical"]
mesh = "builtin:sphere"
bits = 12

[scenario]
n_points = 500
outlier_fraction = 0.3
sigma_xyz = 2.5
flip_first = 0.0
flip_last = 0.1

[solver]
beta = 4
)");
  EXPECT_EQ(b.preset, "table3");
  EXPECT_EQ(b.config.n_seeds, 7);
  EXPECT_EQ(b.config.first_seed, 100u);
  EXPECT_EQ(b.config.threads, 2);
  EXPECT_EQ(b.mesh, "builtin:sphere");
  EXPECT_EQ(b.bits, 12);
  ASSERT_EQ(b.config.solvers.size(), 2u);
  EXPECT_EQ(b.config.solvers[1].label, "hierarchical");
  EXPECT_DOUBLE_EQ(b.config.solvers[1].hierarchical.beta, 4.0);
  EXPECT_EQ(b.config.scenario.n_points, 500u);
  EXPECT_DOUBLE_EQ(b.config.scenario.outlier_fraction, 0.3);
  EXPECT_DOUBLE_EQ(b.config.scenario.flip.last, 0.1);
}

TEST(BenchSettings, Errors) {
  EXPECT_THROW(parse_bench_settings("[bench]\nseeds = 0\n"), ParseError);
  EXPECT_THROW(parse_bench_settings("[bench]\nsolvers = \"plain\"\n"), ParseError);
  EXPECT_THROW(parse_bench_settings("[scenario]\nrho = 0.2\n"), ParseError);
  EXPECT_THROW(parse_bench_settings("[scenario]\noutlier_fraction = 1.5\n"), InvalidArgument);
}
