#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fhnpulse/errors.hpp"
#include "fhnpulse/grid.hpp"

using namespace fhn;

namespace {

Profile random_profile(const Grid& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  std::vector<double> s(g.size());
  for (int j = 0; j <= g.n_x(); ++j)
    for (std::size_t k = 0; k < g.column_size(); ++k) {
      const bool edge = g.is_strip() && (k == 0 || k + 1 == g.column_size());
      s[g.index(j, int(k))] = edge ? 0.0 : N(rng);
    }
  return Profile(g, std::move(s));
}

double ulp_distance(double a, double b) {
  return std::abs(a - b) / (std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b)));
}

}  // namespace

TEST(Grid, PointsAreGeneratedFromOrigin) {
  Grid g = Grid::line(-80.0, 0.01, 16000);
  EXPECT_EQ(g.x(0), -80.0);
  EXPECT_DOUBLE_EQ(g.right_end() - g.x(0), 160.0);
  EXPECT_EQ(g.size(), 16001u);
}

TEST(Grid, StripLayout) {
  Grid g = Grid::strip(-1.0, 0.5, 4, 2.0, 4);
  EXPECT_EQ(g.column_size(), 5u);
  EXPECT_EQ(g.size(), 25u);
  EXPECT_DOUBLE_EQ(g.h_y(), 1.0);
  EXPECT_DOUBLE_EQ(g.y(0), -2.0);
  EXPECT_DOUBLE_EQ(g.y(4), 2.0);
  EXPECT_EQ(g.index(2, 3), 13u);
}

TEST(Grid, RejectsBadShapes) {
  EXPECT_THROW(Grid::line(0.0, 0.0, 10), InvalidArgument);
  EXPECT_THROW(Grid::line(0.0, 0.1, 1), InvalidArgument);
  EXPECT_THROW(Grid::strip(0.0, 0.1, 10, 1.0, 1), InvalidArgument);
  EXPECT_THROW(Grid::strip(0.0, 0.1, 10, -1.0, 4), InvalidArgument);
}

TEST(Profile, Invariants) {
  Grid g = Grid::line(0.0, 0.1, 10);
  EXPECT_THROW(Profile(g, std::vector<double>(5, 0.0)), InvalidArgument);
  std::vector<double> bad(11, 0.0);
  bad[3] = NAN;
  EXPECT_THROW(Profile(g, bad), InvalidArgument);

  Grid s = Grid::strip(0.0, 0.1, 4, 1.0, 4);
  std::vector<double> edge(s.size(), 0.0);
  edge[s.index(2, 0)] = 1.0;
  EXPECT_THROW(Profile(s, edge), InvalidArgument);
}

TEST(ShiftGrid, Translation) {
  Grid g = Grid::line(-80.0, 0.01, 100);
  Profile p = random_profile(g, 1);
  Profile q = shift_grid(p, -1.5);
  EXPECT_EQ(q.grid().origin(), -81.5);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(p[i], q[i]);
  EXPECT_EQ(shift_grid(p, 0.0).grid(), p.grid());
  EXPECT_THROW(shift_grid(p, INFINITY), InvalidArgument);
}

TEST(ShiftGrid, SuccessiveShiftsCompose) {
  Grid g = Grid::line(-80.0, 0.01, 100);
  Profile p = random_profile(g, 2);
  const double a = 0.3712345, b = -1.1234567;
  Profile ab = shift_grid(shift_grid(p, a), b);
  Profile one = shift_grid(p, a + b);
  EXPECT_NEAR(ab.grid().origin(), one.grid().origin(), 1e-15);
}

TEST(ShiftGrid, NoDriftOverManyShifts) {
  Grid g = Grid::line(0.0, 0.01, 10);
  Grid cur = g;
  for (int i = 0; i < 100000; ++i) cur = cur.shifted(0.1);
  for (int i = 0; i < 100000; ++i) cur = cur.shifted(-0.1);
  EXPECT_NEAR(cur.origin(), 0.0, 1e-18);
}

TEST(DiffX, Polynomials) {
  Grid g = Grid::line(-3.0, 0.01, 600);
  Profile c = Profile::sample(g, [](double) { return 2.5; });
  Profile lin = Profile::sample(g, [](double x) { return x; });
  Profile quad = Profile::sample(g, [](double x) { return x * x; });
  Profile dc = diff_x(c), dl = diff_x(lin), dq = diff_x(quad);
  for (int j = 0; j <= g.n_x(); ++j) {
    EXPECT_NEAR(dc.at(j), 0.0, 1e-12);
    EXPECT_NEAR(dl.at(j), 1.0, 1e-10);
    EXPECT_NEAR(dq.at(j), 2.0 * g.x(j), 1e-10);
  }
}

TEST(WeightedIntegral, ClosedForms) {
  Grid g = Grid::line(-10.0, 0.01, 1000);
  EXPECT_EQ(weighted_integral(Profile::zeros(g)), 0.0);
  const double one = weighted_integral(Profile::sample(g, [](double) { return 1.0; }));
  EXPECT_LT(std::abs(one - (1.0 - std::exp(-10.0))) / (1.0 - std::exp(-10.0)), 1e-4);
  const double flat = weighted_integral(Profile::sample(g, [](double x) { return std::exp(-x); }));
  EXPECT_NEAR(flat, 10.0, 1e-4 * 10.0);
}

TEST(WeightedIntegral, TruncationGuard) {
  Grid g = Grid::line(590.0, 0.1, 200);
  EXPECT_THROW(weighted_integral(Profile::zeros(g)), DomainTruncationError);
}

TEST(WeightedIntegral, Linear) {
  Grid g = Grid::line(-5.0, 0.05, 200);
  Profile a = random_profile(g, 3), b = random_profile(g, 4);
  std::vector<double> s(g.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = 2.0 * a[i] - 3.0 * b[i];
  const double lhs = weighted_integral(Profile(g, s));
  const double rhs = 2.0 * weighted_integral(a) - 3.0 * weighted_integral(b);
  EXPECT_NEAR(lhs, rhs, 1e-12 * (std::abs(lhs) + 1.0));
}

TEST(InnerProducts, SymmetryAndBilinearity) {
  for (const Grid& g : {Grid::line(-5.0, 0.05, 200), Grid::strip(-5.0, 0.1, 100, 2.0, 8)}) {
    Profile u = random_profile(g, 5), v = random_profile(g, 6), w = random_profile(g, 7);
    EXPECT_EQ(inner_l2exp(u, v), inner_l2exp(v, u));
    EXPECT_EQ(inner_h1exp(u, v), inner_h1exp(v, u));
    EXPECT_EQ(inner_l2exp(u, Profile::zeros(g)), 0.0);
    std::vector<double> s(g.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = 0.5 * v[i] + w[i];
    const Profile m(g, s);
    EXPECT_NEAR(inner_h1exp(u, m), 0.5 * inner_h1exp(u, v) + inner_h1exp(u, w),
                1e-12 * (std::abs(inner_h1exp(u, m)) + 1.0));
    EXPECT_GE(norm_h1exp_sq(u), 0.0);
  }
}

TEST(InnerProducts, MismatchedGrids) {
  Profile a = Profile::zeros(Grid::line(0.0, 0.1, 10));
  Profile b = Profile::zeros(Grid::line(0.0, 0.1, 11));
  EXPECT_THROW(inner_l2exp(a, b), InvalidArgument);
  EXPECT_THROW(inner_h1exp(a, b), InvalidArgument);
}

TEST(InnerProducts, HatFunctionMatchesNaiveSum) {
  Grid g = Grid::line(-2.0, 0.01, 400);
  Profile hat = Profile::sample(g, [](double x) { return std::max(0.0, 1.0 - std::abs(x)); });
  double naive = 0.0;
  for (int j = 0; j < g.n_x(); ++j) {
    const double xm = -2.0 + (j + 0.5) * 0.01;
    const double a = hat.at(j), b = hat.at(j + 1);
    naive += std::exp(xm) * 0.01 * (((b - a) / 0.01) * ((b - a) / 0.01) + 0.5 * (a * a + b * b));
  }
  EXPECT_NEAR(norm_h1exp_sq(hat), naive, 1e-12 * naive);
}

// Every cell weight picks up e^a under a shift while the samples stay put.
TEST(InnerProducts, ShiftScalingIdentity) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> off(-20.0, 20.0);
  for (const Grid& g : {Grid::line(-80.0, 0.01, 16000), Grid::strip(-30.0, 0.05, 800, 5.0, 16)}) {
    Profile p = random_profile(g, 8);
    const double n0 = norm_h1exp_sq(p);
    for (int t = 0; t < 20; ++t) {
      const double a = off(rng);
      const double n1 = norm_h1exp_sq(shift_grid(p, a));
      EXPECT_LE(ulp_distance(n1, std::exp(a) * n0), 8.0) << "offset " << a;
    }
  }
}

TEST(Resample, SameGridIsIdentity) {
  Grid g = Grid::strip(-5.0, 0.1, 100, 2.0, 8);
  Profile p = Profile::sample(g, [](double x, double y) { return std::exp(-x * x) * std::cos(y); });
  const Profile q = resample(p, g);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(q[i], p[i], 1e-15);
}

TEST(Resample, BilinearFunctionsAreExact) {
  Grid coarse = Grid::strip(-5.0, 0.1, 100, 2.0, 8);
  Grid fine = Grid::strip(-5.0, 0.05, 200, 2.0, 16);
  auto f = [](double x, double y) { return 1.0 + 2.0 * x - 0.5 * y + 0.25 * x * y; };
  const Profile q = resample(Profile::sample(coarse, f), fine);
  // Wall rows of the source are zero, so exactness holds between interior coarse rows.
  for (int j = 0; j <= fine.n_x(); ++j)
    for (int k = 2; k <= fine.n_y() - 2; ++k) EXPECT_NEAR(q.at(j, k), f(fine.x(j), fine.y(k)), 1e-12);
  EXPECT_EQ(q.at(10, 0), 0.0);
  EXPECT_EQ(q.at(10, fine.n_y()), 0.0);
}

TEST(Resample, LineEdgesContinueConstant) {
  Grid src = Grid::line(0.0, 0.5, 4);
  Profile p = Profile::sample(src, [](double x) { return x; });
  const Profile q = resample(p, Grid::line(-1.0, 0.25, 16));
  EXPECT_EQ(q.at(0), 0.0);
  EXPECT_NEAR(q.at(7), 0.75, 1e-15);
  EXPECT_EQ(q.at(16), 2.0);
}

TEST(Resample, RejectsMismatchedShapes) {
  Profile p = Profile::zeros(Grid::strip(0.0, 0.1, 10, 1.0, 4));
  EXPECT_THROW(resample(p, Grid::line(0.0, 0.1, 10)), InvalidArgument);
  EXPECT_THROW(resample(p, Grid::strip(0.0, 0.1, 10, 2.0, 4)), InvalidArgument);
}
