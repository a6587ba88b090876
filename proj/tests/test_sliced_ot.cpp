#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "swdist/error.hpp"
#include "swdist/sliced_ot.hpp"

using namespace swdist;

TEST(SampleDirections, DeterministicUnitRows) {
  const ProjectionPlan plan{3, 5, 42};
  const auto a = sample_directions(plan);
  const auto b = sample_directions(plan);
  EXPECT_TRUE(a == b);
  for (Eigen::Index l = 0; l < a.rows(); ++l) EXPECT_NEAR(a.row(l).norm(), 1.0, 1e-12);
  EXPECT_FALSE(a == sample_directions({3, 5, 43}));
}

TEST(SampleDirections, MeanNearZero) {
  const auto dirs = sample_directions({10000, 3, 1});
  const Eigen::RowVectorXd mean = dirs.colwise().mean();
  EXPECT_LT(mean.norm(), 0.05);
}

TEST(SampleDirections, ZeroDimensionRejected) {
  try {
    sample_directions({3, 0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Dimension);
  }
}

TEST(W2OneD, HandExamples) {
  EXPECT_EQ(w2_squared_1d(std::vector{0.0, 1.0}, std::vector{0.0, 1.0}), 0.0);
  EXPECT_EQ(w2_squared_1d(std::vector{0.0}, std::vector{3.0}), 9.0);
  EXPECT_EQ(oracle::w2_permutation_min({0, 2}, {1, 3}), 1.0);
  EXPECT_EQ(w2_squared_1d(std::vector{0.0, 2.0}, std::vector{1.0, 3.0}), 1.0);
  EXPECT_EQ(w2_squared_1d(std::vector{2.0, 0.0}, std::vector{3.0, 1.0}), 1.0);
}

TEST(W2OneD, Errors) {
  try {
    w2_squared_1d(std::vector<double>{}, std::vector{1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Arity);
  }
  try {
    w2_squared_1d(std::vector{std::nan("")}, std::vector{1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Data);
  }
}

TEST(W2OneD, MatchesPermutationOracle) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 6;
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = normal(rng);
    for (auto& v : y) v = 2.0 * normal(rng) + 0.5;
    EXPECT_LE(oracle::relative_error(w2_squared_1d(x, y), oracle::w2_permutation_min(x, y)), 1e-12);
  }
}

TEST(W2OneD, ShiftGivesSquaredOffset) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(17);
    for (auto& v : x) v = u(rng);
    const double c = u(rng);
    std::vector<double> y(x);
    for (auto& v : y) v += c;
    EXPECT_NEAR(w2_squared_1d(x, y), c * c, 1e-12 * (1 + c * c));
  }
}

TEST(W2OneD, UnequalSizesMatchReplicatedEqualSizes) {
  // Replicating every x point m times and every y point n times leaves both
  // empirical measures unchanged and makes the sizes equal.
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + trial % 7, m = 2 + (trial * 5) % 9;
    std::vector<double> x(n), y(m);
    for (auto& v : x) v = normal(rng);
    for (auto& v : y) v = normal(rng) + 1.0;
    std::vector<double> xr, yr;
    for (double v : x) xr.insert(xr.end(), m, v);
    for (double v : y) yr.insert(yr.end(), n, v);
    std::sort(xr.begin(), xr.end());
    std::sort(yr.begin(), yr.end());
    double ref = 0.0;
    for (std::size_t i = 0; i < xr.size(); ++i) ref += (xr[i] - yr[i]) * (xr[i] - yr[i]);
    ref /= static_cast<double>(xr.size());
    EXPECT_LE(oracle::relative_error(w2_squared_1d(x, y), ref), 1e-12);
    EXPECT_EQ(w2_squared_1d(x, y), w2_squared_1d(y, x));
  }
}

TEST(Swd, IdentityAndSymmetryAreExact) {
  const EmbeddingSet a(oracle::gaussian(300, 7, 1));
  const EmbeddingSet b(oracle::gaussian(250, 7, 2, 1.5, 0.3));
  const ProjectionPlan plan{200, 7, 9};
  EXPECT_EQ(swd_squared(a, a, plan).value, 0.0);
  const double ab = swd_squared(a, b, plan).value;
  EXPECT_GT(ab, 0.0);
  EXPECT_EQ(ab, swd_squared(b, a, plan).value);
  EXPECT_EQ(ab, swd_squared(a, b, plan).value);
}

TEST(Swd, MatchesBruteForcePerDirection) {
  const EmbeddingSet a(oracle::gaussian(5, 3, 21));
  const EmbeddingSet b(oracle::gaussian(5, 3, 22, 1.0, 0.7));
  const ProjectionPlan plan{64, 3, 5};
  const auto res = swd_squared(a, b, plan, true);
  const auto dirs = sample_directions(plan);
  double total = 0.0;
  for (Eigen::Index l = 0; l < dirs.rows(); ++l) {
    std::vector<double> pa(5), pb(5);
    for (int i = 0; i < 5; ++i) {
      pa[i] = a.data().row(i).dot(dirs.row(l));
      pb[i] = b.data().row(i).dot(dirs.row(l));
    }
    const double brute = oracle::w2_permutation_min(pa, pb);
    EXPECT_LE(oracle::relative_error((*res.per_direction_values)[l], brute), 1e-12);
    total += brute;
  }
  EXPECT_LE(oracle::relative_error(res.value, total / 64.0), 1e-12);
}

TEST(Swd, ValueIsMeanOfPerDirection) {
  const EmbeddingSet a(oracle::gaussian(100, 4, 1));
  const EmbeddingSet b(oracle::gaussian(80, 4, 2, 2.0));
  const auto res = swd_squared(a, b, {77, 4, 3}, true);
  ASSERT_TRUE(res.per_direction_values);
  const auto& v = *res.per_direction_values;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  EXPECT_LE(oracle::relative_error(res.value, mean), 1e-12);
  EXPECT_FALSE(swd_squared(a, b, {77, 4, 3}).per_direction_values);
}

TEST(Swd, DimensionMismatch) {
  const EmbeddingSet a(oracle::gaussian(10, 4, 1));
  const EmbeddingSet b(oracle::gaussian(10, 5, 2));
  try {
    swd_squared(a, b, {10, 4, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Shape);
  }
}

TEST(PlanProjections, ReferenceQuery) {
  // ceil(128 * (8 ln 64 - ln 0.025)) = ceil(4730.87...)
  const double exact = 128.0 * (8.0 * std::log(64.0) - std::log(0.025));
  EXPECT_NEAR(exact, 4730.87, 0.01);
  EXPECT_EQ(plan_projections({4, 2.0, 0.5, 0.05, 1.0}), 4731u);
}

TEST(PlanProjections, AffineInK) {
  // interior(k) = 2k ln(64) - ln(delta/2): each extra k adds 2 ln 64 to it.
  const double scale = 128.0;
  const auto l4 = plan_projections({4, 2.0, 0.5, 0.05, 1.0});
  const auto l8 = plan_projections({8, 2.0, 0.5, 0.05, 1.0});
  EXPECT_GT(l8, l4);
  EXPECT_NEAR(static_cast<double>(l8 - l4), scale * 8.0 * std::log(64.0), 1.0);
}

TEST(PlanProjections, MonotoneInTolerance) {
  for (double tau : {2.0, 1.0, 0.5, 0.25, 0.1}) {
    EXPECT_LT(plan_projections({4, 2.0, tau, 0.05, 1.0}), plan_projections({4, 2.0, tau / 2, 0.05, 1.0}));
  }
}

TEST(PlanProjections, DomainErrors) {
  auto kind = [](BoundQuery q) {
    try {
      plan_projections(q);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Input;
  };
  EXPECT_EQ(kind({4, 2.0, 40.0, 0.05, 1.0}), ErrorKind::Domain);  // 8CD^2/tau < 1
  EXPECT_EQ(kind({4, 2.0, 32.0, 0.05, 1.0}), ErrorKind::Domain);  // == 1
  EXPECT_EQ(kind({4, 2.0, 0.5, 0.0, 1.0}), ErrorKind::Domain);
  EXPECT_EQ(kind({4, 2.0, 0.5, 1.0, 1.0}), ErrorKind::Domain);
  EXPECT_EQ(kind({0, 2.0, 0.5, 0.05, 1.0}), ErrorKind::Domain);
  EXPECT_EQ(kind({4, -1.0, 0.5, 0.05, 1.0}), ErrorKind::Domain);
}

TEST(Ablation, StdShrinksWithMoreDirections) {
  const EmbeddingSet a(oracle::gaussian(200, 6, 1));
  const EmbeddingSet b(oracle::gaussian(200, 6, 2, 1.0, 0.5));
  std::vector<std::uint64_t> seeds(10);
  std::iota(seeds.begin(), seeds.end(), 0);
  const std::vector<std::size_t> grid{10, 500};
  const auto rows = ablate_projections(a, b, grid, seeds, 3);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_LT(rows[1].stddev, rows[0].stddev);
  EXPECT_GT(rows[0].seconds, 0.0);
}

TEST(Ablation, SingleRowAndIdenticalInputs) {
  const EmbeddingSet a(oracle::gaussian(50, 3, 1));
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  const std::vector<std::size_t> one{10};
  EXPECT_EQ(ablate_projections(a, a, one, seeds, 0).size(), 1u);
  const std::vector<std::size_t> grid{10, 50, 100};
  for (const auto& row : ablate_projections(a, a, grid, seeds, 0)) {
    EXPECT_EQ(row.mean, 0.0);
    EXPECT_EQ(row.stddev, 0.0);
  }
  EXPECT_EQ(default_ablation_grid().size(), 11u);
}

TEST(Swd, LargePlansMatchMaterializedDirections) {
  const EmbeddingSet a(oracle::gaussian(40, 3, 1));
  const EmbeddingSet b(oracle::gaussian(30, 3, 2, 1.2));
  const ProjectionPlan plan{9000, 3, 17};
  const auto res = swd_squared(a, b, plan, true);
  const RowMatrix dirs = sample_directions(plan);
  ASSERT_EQ(res.per_direction_values->size(), 9000u);
  for (Eigen::Index l : {0, 4095, 4096, 8999}) {
    std::vector<double> pa, pb;
    for (Eigen::Index i = 0; i < a.data().rows(); ++i) pa.push_back(a.data().row(i).dot(dirs.row(l)));
    for (Eigen::Index i = 0; i < b.data().rows(); ++i) pb.push_back(b.data().row(i).dot(dirs.row(l)));
    EXPECT_LE(oracle::relative_error((*res.per_direction_values)[l], w2_squared_1d(pa, pb)), 1e-12);
  }
}
