#include <gtest/gtest.h>

#include <cmath>

#include "fhnpulse/errors.hpp"
#include "fhnpulse/nonlocal.hpp"
#include "fhnpulse/verification.hpp"

using namespace fhn;

TEST(Oracle, IdentitySystem) {
  BandedSystem sys;
  sys.n_x = 9;
  const std::size_t n = sys.unknowns();
  sys.diag.assign(n, 1.0);
  sys.west.assign(n, 0.0);
  sys.east.assign(n, 0.0);
  sys.south.assign(n, 0.0);
  sys.north.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) sys.rhs.push_back(0.5 * double(i) - 1.0);
  Grid g = Grid::line(0.0, 0.1, 9);
  const Profile p = dense_oracle_solve(sys, g);
  for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(p[i], sys.rhs[i]);
}

TEST(Oracle, SingularSystem) {
  DenseSystem s;
  s.n = 2;
  s.a = {1.0, 2.0, 2.0, 4.0};
  s.b = {1.0, 1.0};
  EXPECT_THROW(dense_solve(s), NumericalError);
}

TEST(Oracle, IndependentAssemblyMatchesStencil) {
  Grid g = Grid::line(-5.0, 0.05, 200);
  Profile s = Profile::sample(g, [](double x) { return std::exp(-x * x); });
  ModelParams p;
  p.d = 5e-4;
  p.gamma = 1.0 / 16.0;
  p.beta = 0.25;
  p.c = 5.0;
  const double kappa = p.gamma / (p.c * p.c);
  std::vector<double> scaled(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) scaled[i] = s[i] / (p.c * p.c);
  const DenseSystem d = assemble_resolvent_dense(Profile(g, scaled), kappa, eigen_nu(p));
  const std::vector<double> y = dense_solve(d);
  const Profile v = apply_Lc(s, p);
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(y[i], v[i], 1e-10);
}

TEST(Oracle, ReportFormatting) {
  const OracleReport r = OracleReport::make("x", 1e-12, 1e-10, "grid");
  EXPECT_TRUE(r.pass);
  EXPECT_FALSE(OracleReport::make("x", 2e-10, 1e-10, "grid").pass);
  const std::string s = format_report(r);
  EXPECT_NE(s.find("PASS"), std::string::npos);
  EXPECT_NE(s.find("x"), std::string::npos);
}

TEST(Oracle, FittedOrderOfExactPowerLaw) {
  const std::vector<double> hs{0.2, 0.1, 0.05};
  std::vector<double> es;
  for (double h : hs) es.push_back(3.0 * h * h);
  EXPECT_NEAR(fitted_order(hs, es), 2.0, 1e-12);
}

TEST(Oracle, FdStepRange) {
  Grid g = Grid::line(-10.0, 0.05, 400);
  Profile w = Profile::sample(g, [](double x) { return std::exp(-x * x); });
  ModelParams p;
  p.d = 5e-4;
  p.gamma = 1.0 / 16.0;
  p.beta = 0.25;
  p.c = 5.0;
  EXPECT_THROW(fd_gradient_check(w, w, p, 1e-1), InvalidArgument);
}

// The full suite behind `fhn_pulse verify`.
TEST(Oracle, Suite) {
  const auto reports = run_verification_suite();
  EXPECT_GE(reports.size(), 10u);
  for (const auto& r : reports) EXPECT_TRUE(r.pass) << format_report(r);
}
