#include <cmath>

#include <gtest/gtest.h>

#include "llgs/io.hpp"
#include "llgs/llgs.hpp"

using namespace llgs;
using io::json;

TEST(Io, UnknownKeysRejected) {
  EXPECT_THROW(io::material_from_json(json::parse(R"({"alpha": 0.5, "gamma": 1})")), ConfigError);
  EXPECT_THROW(io::bvp_from_json(json::parse(R"({"L": 50, "mesh": 10})")), ConfigError);
  EXPECT_THROW(io::freeze_from_json(json::parse(R"({"T": 5, "steps": 10})")), ConfigError);
}

TEST(Io, MaterialValidationNamesConstraint) {
  try {
    io::material_from_json(json::parse(R"({"c_cp": 1.5})"));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("c_cp"), std::string::npos);
  }
  EXPECT_THROW(io::material_from_json(json::parse(R"({"alpha": "x"})")), ConfigError);
}

TEST(Io, MaterialRoundTrip) {
  const MaterialParams mp{0.3, 0.2, -2.0, 1.5, -0.25};
  const MaterialParams back = io::material_from_json(io::to_json(mp));
  EXPECT_EQ(back.alpha, mp.alpha);
  EXPECT_EQ(back.beta, mp.beta);
  EXPECT_EQ(back.mu, mp.mu);
  EXPECT_EQ(back.h, mp.h);
  EXPECT_EQ(back.c_cp, mp.c_cp);
}

TEST(Io, FixedFloatFormat) {
  EXPECT_EQ(io::fmt(0.1), "0.10000000000000001");
  EXPECT_EQ(io::fmt(-2.0), "-2");
  EXPECT_EQ(std::stod(io::fmt(M_PI)), M_PI);
}

TEST(Io, ProfileRoundTripReseedsNewton) {
  const MaterialParams mp{0.5, 0.1, -1.0, 0.5, 0.0};
  CollocationBvp bvp(BvpSpec::defaults(RegimeKind::Codim2), {});
  const BvpSolution start = solve_homogeneous(bvp, mp);
  const Branch br = continue_branch(bvp, start, Param::Ccp, 0.2);
  ASSERT_EQ(br.terminated, BranchEnd::ReachedTarget);
  const BvpSolution end = branch_end_solution(br);

  Profile pr = end.profile;
  pr.mp = end.params.mp;
  pr.wf = end.params.wf;
  const std::string text = io::to_json(pr).dump();
  const Profile back = io::profile_from_json(json::parse(text));
  EXPECT_EQ(io::to_json(back).dump(), text);

  ParamSet base;
  base.mp = back.mp;
  base.wf = back.wf;
  CollocationBvp again(BvpSpec::defaults(RegimeKind::Codim2), {});
  const BvpSolution sol = solve_bvp(again, back, base);
  EXPECT_LE(sol.report.iterations, 2);
  EXPECT_NEAR(sol.params.wf.s, end.params.wf.s, 1e-10);
}

TEST(Io, ProfileSchemaChecked) {
  EXPECT_THROW(io::profile_from_json(json::parse(R"({"schema": "other"})")), ConfigError);
  EXPECT_THROW(io::regime_from_string("codim1"), ConfigError);
}

TEST(Io, CsvColumns) {
  const MaterialParams mp{0.5, 0.1, -1.0, 0.5, 0.0};
  const Profile pr = homogeneous_seed(mp, 5.0, 50);
  const std::string csv = io::profile_csv(pr);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "xi,theta,p,q,m1,m2,m3");
  EXPECT_EQ(csv, io::profile_csv(pr));
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  FreezeSeries fs;
  fs.times = {0.1};
  fs.s = {1.0};
  fs.omega = {2.0};
  EXPECT_EQ(io::series_csv(fs), "t,s,omega\n0.10000000000000001,1,2\n");
}

TEST(Io, BranchJson) {
  Branch br;
  BranchPoint pt;
  pt.params.mp.c_cp = 0.25;
  br.points.push_back(pt);
  const json j = io::to_json(br);
  EXPECT_EQ(j["schema"], "llgs.branch/1");
  EXPECT_EQ(j["points"][0]["c_cp"], 0.25);
  EXPECT_EQ(j["terminated"], "reached_target");
}
