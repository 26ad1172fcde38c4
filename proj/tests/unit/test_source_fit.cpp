#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "firesim/simulator.hpp"
#include "firesim/source_fit.hpp"
#include "support/errors.hpp"
#include "support/oracles.hpp"

using namespace firesim;

namespace {

std::vector<double> random_simplex(SplitRng& rng, std::size_t n, bool sparse) {
  std::vector<double> w(n);
  for (auto& x : w) x = sparse && rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.05, 1.0);
  if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; })) w[0] = 1.0;
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= s;
  return w;
}

std::vector<ScalarField> random_history(const GridSpec& s, SplitRng& rng, std::size_t n) {
  std::vector<ScalarField> h;
  for (std::size_t i = 0; i < n; ++i) h.push_back(oracle::random_field(s, rng, -1, 1));
  return h;
}

ScalarField smooth_bump(const GridSpec& s, double cx, double cy, double width, double amp) {
  return ScalarField::generate(
      s, [&](double x, double y) { return amp * std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / width); });
}

}  // namespace

TEST(SimplexWeights, Invariants) {
  EXPECT_NO_THROW(SimplexWeights({0.2, 0.3, 0.5}));
  EXPECT_EQ(code_of([] { SimplexWeights(std::vector<double>{}); }), ErrorCode::EmptyVector);
  EXPECT_EQ(code_of([] { SimplexWeights({0.5, 0.6}); }), ErrorCode::BadRange);
  EXPECT_EQ(code_of([] { SimplexWeights({1.1, -0.1}); }), ErrorCode::BadRange);
  const auto u = SimplexWeights::uniform(4);
  for (double w : u.values()) EXPECT_EQ(w, 0.25);
}

TEST(ProjectSimplex, Examples) {
  const std::vector<double> on{0.2, 0.3, 0.5};
  const auto p = project_simplex(on);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(p[i], on[i], 1e-15);
  const auto q = project_simplex(std::vector<double>{10, 0, 0});
  EXPECT_EQ(q[0], 1.0);
  EXPECT_EQ(q[1], 0.0);
  EXPECT_EQ(q[2], 0.0);
  const auto one = project_simplex(std::vector<double>{-3.7});
  EXPECT_EQ(one[0], 1.0);
}

TEST(ProjectSimplex, Errors) {
  EXPECT_EQ(code_of([] { project_simplex(std::vector<double>{}); }), ErrorCode::EmptyVector);
  EXPECT_EQ(code_of([] { project_simplex(std::vector<double>{1.0, NAN}); }), ErrorCode::NonFinite);
}

TEST(ProjectSimplex, ConstraintsAndIdempotence) {
  SplitRng rng(21);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + trial % 9;
    std::vector<double> v(n);
    const double scale = std::pow(10.0, rng.uniform(-3, 3));
    for (auto& x : v) x = rng.uniform(-scale, scale);
    const auto p = project_simplex(v);
    double sum = 0;
    for (double w : p.values()) {
      EXPECT_GE(w, 0.0);
      sum += w;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
    const auto pp = project_simplex(p.values());
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(pp[i], p[i], 1e-15);
  }
}

TEST(ProjectSimplex, NeverBeatenByRandomScan) {
  SplitRng rng(22);
  std::mt19937_64 gen(22);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(5);
    for (auto& x : v) x = rng.uniform(-1, 2);
    const auto p = project_simplex(v);
    EXPECT_LE(oracle::sq_dist(v, p.values()), oracle::simplex_scan(v, 20000, gen) + 1e-12);
  }
}

TEST(EstimateObservedSource, ConstantHistoryIsZero) {
  const GridSpec s(6, 6, 1.0);
  PhysicalParams p;
  const std::vector<ScalarField> h(4, ScalarField(s, 0.7));
  const auto src = estimate_observed_source(h, VectorField::zero(s), ScalarField(s, 0.0), p, 5.0);
  for (double v : src.values()) EXPECT_EQ(v, 0.0);
}

TEST(EstimateObservedSource, Errors) {
  const GridSpec s(4, 4, 1.0), t(4, 5, 1.0);
  PhysicalParams p;
  const std::vector<ScalarField> two(2, ScalarField(s, 0.0));
  EXPECT_EQ(code_of([&] { estimate_observed_source(two, VectorField::zero(s), ScalarField(s, 0.0), p, 1.0); }),
            ErrorCode::TooFewFrames);
  std::vector<ScalarField> mixed{ScalarField(s, 0.0), ScalarField(t, 0.0), ScalarField(s, 0.0)};
  EXPECT_EQ(code_of([&] { estimate_observed_source(mixed, VectorField::zero(s), ScalarField(s, 0.0), p, 1.0); }),
            ErrorCode::SpecMismatch);
  const std::vector<ScalarField> three(3, ScalarField(s, 0.0));
  EXPECT_EQ(code_of([&] { estimate_observed_source(three, VectorField::zero(t), ScalarField(s, 0.0), p, 1.0); }),
            ErrorCode::SpecMismatch);
  EXPECT_EQ(code_of([&] { estimate_observed_source(three, VectorField::zero(s), ScalarField(s, 0.0), p, 0.0); }),
            ErrorCode::BadRange);
}

TEST(EstimateObservedSource, HeatCapacityScalesOnlyTheTimeTerm) {
  const GridSpec s(8, 8, 1.0);
  SplitRng rng(30);
  const auto h = random_history(s, rng, 3);
  const auto wind = VectorField::uniform(s, 0.7, -0.3);
  const auto terrain = oracle::random_field(s, rng, 0, 2);
  PhysicalParams p1, p2;
  p1.c = 1.0;
  p2.c = 2.0;
  const auto s1 = estimate_observed_source(h, wind, terrain, p1, 0.5);
  const auto s2 = estimate_observed_source(h, wind, terrain, p2, 0.5);
  for (std::size_t i = 0; i < s.cells(); ++i) {
    const double time_term = (h[2][i] - h[0][i]) / (2 * 0.5);
    EXPECT_NEAR(s2[i] - s1[i], time_term, 1e-12);
  }
}

TEST(EstimateObservedSource, UsesLastCentredFrame) {
  const GridSpec s(5, 5, 1.0);
  SplitRng rng(31);
  const auto h = random_history(s, rng, 6);
  PhysicalParams p;
  const auto last = estimate_observed_source(h, VectorField::zero(s), ScalarField(s, 0.0), p, 1.0);
  const auto at = estimate_observed_source_at(h, 4, VectorField::zero(s), ScalarField(s, 0.0), p, 1.0);
  EXPECT_EQ(last, at);
  const std::vector<VectorField> winds{VectorField::zero(s)};
  const auto series = estimate_observed_source_series(h, winds, ScalarField(s, 0.0), p, 1.0);
  ASSERT_EQ(series.size(), h.size());
  EXPECT_EQ(series[4], at);
}

TEST(EstimateObservedSource, ForwardSimulateThenInvert) {
  const GridSpec s(24, 24, 1.0);
  PhysicalParams p;
  const auto terrain = ScalarField::generate(s, [](double, double y) { return 0.1 * y; });
  const Environment env(terrain, {VectorField::uniform(s, 1.0, 0.5)}, ScalarField(s, 1.0));
  StepOptions opt;
  opt.fuel_depletion = false;
  const SourceFn src = physical_source(p);
  for (double dt : {0.05, 0.01}) {
    SimState st{smooth_bump(s, 11, 12, 12.0, 1.2), env.fuel0, 0.0};
    std::vector<ScalarField> h{st.temp};
    for (int i = 0; i < 2; ++i) {
      st = step(st, env, p, src, dt, opt);
      h.push_back(st.temp);
    }
    const auto est = estimate_observed_source(h, env.wind[0], terrain, p, dt);
    const auto truth = source_term(h[1], env.fuel0, p);
    double worst = 0;
    for (std::size_t i = 0; i < s.cells(); ++i) worst = std::max(worst, std::abs(est[i] - truth[i]));
    EXPECT_LE(worst, 10 * dt) << "dt=" << dt;
  }
}

TEST(FitSourceWeights, SingleFrameIsThePoint) {
  const GridSpec s(5, 5, 1.0);
  SplitRng rng(40);
  const auto h = random_history(s, rng, 1);
  const auto target = oracle::random_field(s, rng);
  const auto r = fit_source_weights(h, target);
  EXPECT_EQ(r.weights.size(), 1u);
  EXPECT_EQ(r.weights[0], 1.0);
  double d = 0;
  for (std::size_t i = 0; i < s.cells(); ++i) d += (h[0][i] - target[i]) * (h[0][i] - target[i]);
  EXPECT_NEAR(r.residual_norm, std::sqrt(d), 1e-12);
  EXPECT_TRUE(r.converged);
}

TEST(FitSourceWeights, TargetEqualToFirstFrame) {
  const GridSpec s(10, 10, 1.0);
  SplitRng rng(41);
  const auto h = random_history(s, rng, 2);
  const auto r = fit_source_weights(h, h[0]);
  EXPECT_NEAR(r.weights[0], 1.0, 1e-6);
  EXPECT_NEAR(r.weights[1], 0.0, 1e-6);
  EXPECT_NEAR(r.residual_norm, 0.0, 1e-5);
  EXPECT_TRUE(r.converged);
}

TEST(FitSourceWeights, EvenMixture) {
  const GridSpec s(10, 10, 1.0);
  SplitRng rng(42);
  const auto h = random_history(s, rng, 2);
  const auto target = combine(SimplexWeights({0.5, 0.5}), h);
  const auto r = fit_source_weights(h, target);
  EXPECT_NEAR(r.weights[0], 0.5, 1e-3);
  EXPECT_NEAR(r.weights[1], 0.5, 1e-3);
}

TEST(FitSourceWeights, RecoversPlantedWeightsWithMonotoneTrace) {
  SplitRng rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    const GridSpec s(8, 8, 1.0);
    const std::size_t n = 2 + trial % 6;
    const auto h = random_history(s, rng, n);
    const auto planted = random_simplex(rng, n, trial % 2 == 1);
    const auto r = fit_source_weights(h, combine(SimplexWeights(planted), h));
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(r.weights[i], planted[i], 1e-3) << trial;
    EXPECT_LE(r.iterations, FitOptions{}.max_iters);
    EXPECT_GE(r.residual_norm, 0.0);
    ASSERT_FALSE(r.objective_trace.empty());
    for (std::size_t i = 1; i < r.objective_trace.size(); ++i)
      EXPECT_LE(r.objective_trace[i], r.objective_trace[i - 1] + 1e-12);
  }
}

TEST(FitSourceWeights, PermutationEquivariance) {
  SplitRng rng(44);
  std::mt19937_64 gen(44);
  for (int trial = 0; trial < 20; ++trial) {
    const GridSpec s(6, 6, 1.0);
    const std::size_t n = 3 + trial % 4;
    const auto h = random_history(s, rng, n);
    const auto target = oracle::random_field(s, rng, -1, 1);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<ScalarField> permuted;
    for (auto i : perm) permuted.push_back(h[i]);
    const auto a = fit_source_weights(h, target);
    const auto b = fit_source_weights(permuted, target);
    for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(b.weights[j], a.weights[perm[j]], 1e-6) << trial;
  }
}

TEST(FitSourceWeights, FlatObjectiveKeepsUniformStart) {
  const GridSpec s(5, 5, 1.0);
  SplitRng rng(45);
  const auto f = oracle::random_field(s, rng);
  const std::vector<ScalarField> h(5, f);
  const auto r = fit_source_weights(h, oracle::random_field(s, rng));
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(r.weights[i], 0.2);
  EXPECT_TRUE(r.converged);
  const std::vector<ScalarField> zeros(3, ScalarField(s, 0.0));
  const auto z = fit_source_weights(zeros, f);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(z.weights[i], 1.0 / 3.0);
}

TEST(FitSourceWeights, Errors) {
  const GridSpec s(4, 4, 1.0), t(4, 5, 1.0);
  const std::vector<ScalarField> h(2, ScalarField(s, 1.0));
  EXPECT_EQ(code_of([&] { fit_source_weights(h, ScalarField(t, 0.0)); }), ErrorCode::SpecMismatch);
  const std::vector<ScalarField> huge(2, ScalarField(s, 1e200));
  EXPECT_EQ(code_of([&] { fit_source_weights(huge, ScalarField(s, 1.0)); }), ErrorCode::NonFinite);
}

TEST(Combine, WeightedSum) {
  const GridSpec s(3, 3, 1.0);
  const std::vector<ScalarField> h{ScalarField(s, 2.0), ScalarField(s, 4.0)};
  for (double v : combine(SimplexWeights({0.25, 0.75}), h).values()) EXPECT_EQ(v, 3.5);
  EXPECT_EQ(code_of([&] { combine(SimplexWeights({1.0}), h); }), ErrorCode::SpecMismatch);
}
