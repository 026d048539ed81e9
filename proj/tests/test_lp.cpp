#include <doctest.h>

#include <cmath>
#include <vector>

#include "kmedlp/certificate.hpp"
#include "kmedlp/json_io.hpp"
#include "kmedlp/lp.hpp"
#include "kmedlp/recovery.hpp"
#include "kmedlp/rng.hpp"

using namespace kmedlp;

namespace {

PointArray collinear_points() {
  PointArray pts(1);
  for (double v : {0.0, 1.0, 2.0, 10.0, 11.0, 12.0}) pts.push(std::vector<double>{v});
  return pts;
}

PointArray random_points(RngStream& rng, long n, int m) {
  PointArray pts(m);
  for (long i = 0; i < n; ++i) {
    std::vector<double> p(static_cast<std::size_t>(m));
    for (auto& c : p) c = rng.uniform(-1.0, 1.0);
    pts.push(p);
  }
  return pts;
}

// Independent oracle: two-phase dense tableau simplex on the full model
// (assignment rows, all N^2 linking rows, cardinality row). Only suitable for
// tiny N; exists to cross-check the structured solver.
double naive_lp_objective(const LpModel& model) {
  long N = model.N;
  long rows = N + N * N + 1;
  long nz = N * N, ny = N, ns = N * N, na = N + 1;
  long cols = nz + ny + ns + na;
  auto zc = [&](long p, long q) { return p * N + q; };
  auto yc = [&](long p) { return nz + p; };
  auto sc = [&](long p, long q) { return nz + ny + p * N + q; };
  auto ac = [&](long r) { return nz + ny + ns + r; };  // artificial for eq row r

  // rows 0..N-1 assignment(q), N..N+N^2-1 links(p,q), last row cardinality
  std::vector<std::vector<double>> T(static_cast<std::size_t>(rows),
                                     std::vector<double>(static_cast<std::size_t>(cols + 1), 0.0));
  std::vector<long> basis(static_cast<std::size_t>(rows), -1);
  for (long q = 0; q < N; ++q) {
    for (long p = 0; p < N; ++p) T[q][static_cast<std::size_t>(zc(p, q))] = 1.0;
    T[q][static_cast<std::size_t>(ac(q))] = 1.0;
    T[q][static_cast<std::size_t>(cols)] = 1.0;
    basis[static_cast<std::size_t>(q)] = ac(q);
  }
  for (long p = 0; p < N; ++p)
    for (long q = 0; q < N; ++q) {
      long r = N + p * N + q;
      T[r][static_cast<std::size_t>(zc(p, q))] = 1.0;
      T[r][static_cast<std::size_t>(yc(p))] = -1.0;
      T[r][static_cast<std::size_t>(sc(p, q))] = 1.0;
      basis[static_cast<std::size_t>(r)] = sc(p, q);
    }
  long cr = rows - 1;
  for (long p = 0; p < N; ++p) T[cr][static_cast<std::size_t>(yc(p))] = 1.0;
  T[cr][static_cast<std::size_t>(ac(N))] = 1.0;
  T[cr][static_cast<std::size_t>(cols)] = double(model.k);
  basis[static_cast<std::size_t>(cr)] = ac(N);

  auto run_phase = [&](const std::vector<double>& cost) {
    for (long iter = 0; iter < 200000; ++iter) {
      // reduced costs via the basis costs (Bland's rule throughout)
      std::vector<double> dual(static_cast<std::size_t>(rows), 0.0);
      // price: rc_j = c_j - sum_r cB_r * T[r][j]; computed directly
      long enter = -1;
      for (long j = 0; j < cols; ++j) {
        double rc = cost[static_cast<std::size_t>(j)];
        for (long r = 0; r < rows; ++r) {
          long b = basis[static_cast<std::size_t>(r)];
          double cb = cost[static_cast<std::size_t>(b)];
          if (cb != 0.0) rc -= cb * T[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)];
        }
        if (rc < -1e-9) {
          enter = j;
          break;
        }
      }
      (void)dual;
      if (enter < 0) return true;
      long leave = -1;
      double best = 0.0;
      for (long r = 0; r < rows; ++r) {
        double a = T[static_cast<std::size_t>(r)][static_cast<std::size_t>(enter)];
        if (a > 1e-11) {
          double ratio = T[static_cast<std::size_t>(r)][static_cast<std::size_t>(cols)] / a;
          if (leave < 0 || ratio < best - 1e-12 ||
              (ratio < best + 1e-12 &&
               basis[static_cast<std::size_t>(r)] < basis[static_cast<std::size_t>(leave)])) {
            best = ratio;
            leave = r;
          }
        }
      }
      if (leave < 0) return false;  // unbounded: never expected here
      double piv = T[static_cast<std::size_t>(leave)][static_cast<std::size_t>(enter)];
      for (long j = 0; j <= cols; ++j) T[static_cast<std::size_t>(leave)][static_cast<std::size_t>(j)] /= piv;
      for (long r = 0; r < rows; ++r) {
        if (r == leave) continue;
        double f = T[static_cast<std::size_t>(r)][static_cast<std::size_t>(enter)];
        if (f == 0.0) continue;
        for (long j = 0; j <= cols; ++j)
          T[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] -=
              f * T[static_cast<std::size_t>(leave)][static_cast<std::size_t>(j)];
      }
      basis[static_cast<std::size_t>(leave)] = enter;
    }
    return false;
  };

  std::vector<double> phase1(static_cast<std::size_t>(cols), 0.0);
  for (long r = 0; r < na; ++r) phase1[static_cast<std::size_t>(ac(r))] = 1.0;
  REQUIRE(run_phase(phase1));
  std::vector<double> phase2(static_cast<std::size_t>(cols), 0.0);
  for (long p = 0; p < N; ++p)
    for (long q = 0; q < N; ++q) phase2[static_cast<std::size_t>(zc(p, q))] = model.d(p, q);
  for (long r = 0; r < na; ++r) phase2[static_cast<std::size_t>(ac(r))] = 1e9;  // keep them out
  REQUIRE(run_phase(phase2));
  double obj = 0.0;
  for (long r = 0; r < rows; ++r) {
    long b = basis[static_cast<std::size_t>(r)];
    obj += phase2[static_cast<std::size_t>(b)] * T[static_cast<std::size_t>(r)][static_cast<std::size_t>(cols)];
  }
  return obj;
}

Instance tiny_instance(RngStream& rng, long n, int k) {
  PointArray pts = random_points(rng, n, 2);
  MeasureSpec meas = MeasureSpec::uniform_ball(2, 4.0);
  Instance inst;
  inst.m = 2;
  inst.k = k;
  inst.n = n;
  inst.seed = 0;
  inst.balls.assign(static_cast<std::size_t>(k), make_ball({0.0, 0.0}, 4.0, meas));
  inst.points = pts;
  inst.labels.assign(static_cast<std::size_t>(n), 0);
  return inst;
}

}  // namespace

TEST_CASE("model shape") {
  RngStream rng(1);
  PointArray pts = random_points(rng, 3, 2);
  LpModel model = LpModel::from_points(pts, 1);
  CHECK(model.num_variables() == 12);
  CHECK(model.num_constraints() == 13);
  CHECK_THROWS_AS(LpModel::from_points(pts, 4), std::invalid_argument);
}

TEST_CASE("collinear instance solves to the integral optimum") {
  LpModel model = LpModel::from_points(collinear_points(), 2);
  auto [sol, dual] = solve(model);
  REQUIRE(sol.status == LpSolution::Status::optimal);
  CHECK(sol.objective == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(sol.y[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.y[4] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::fabs(dual.objective(2) - sol.objective) <= 1e-7 * (1.0 + sol.objective));
}

TEST_CASE("k equal to N gives the zero solution") {
  RngStream rng(2);
  PointArray pts = random_points(rng, 5, 2);
  auto [sol, dual] = solve(LpModel::from_points(pts, 5));
  REQUIRE(sol.status == LpSolution::Status::optimal);
  CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-10));
  for (double v : sol.y) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
  (void)dual;

  PointArray two(2);
  two.push(std::vector<double>{0.0, 0.0});
  two.push(std::vector<double>{1.0, 1.0});
  auto [sol2, dual2] = solve(LpModel::from_points(two, 2));
  (void)dual2;
  CHECK(sol2.objective == doctest::Approx(0.0));
  CHECK(sol2.zval(0, 0, 2) == doctest::Approx(1.0));
  CHECK(sol2.zval(1, 1, 2) == doctest::Approx(1.0));
  CHECK(sol2.zval(0, 1, 2) == doctest::Approx(0.0));
}

TEST_CASE("agrees with the naive full-model simplex on tiny instances") {
  RngStream rng(3);
  for (int t = 0; t < 30; ++t) {
    long n = 4 + static_cast<long>(rng.uniform(0.0, 4.0));
    int k = 1 + static_cast<int>(rng.uniform(0.0, 3.0));
    if (k > n) k = static_cast<int>(n);
    PointArray pts = random_points(rng, n, 2);
    LpModel model = LpModel::from_points(pts, k);
    auto [sol, dual] = solve(model);
    (void)dual;
    REQUIRE(sol.status == LpSolution::Status::optimal);
    double naive = naive_lp_objective(model);
    CHECK(sol.objective == doctest::Approx(naive).epsilon(1e-6));
  }
}

TEST_CASE("LP lower-bounds the IP; equality on integral optima") {
  RngStream rng(4);
  for (int t = 0; t < 50; ++t) {
    long n = 5 + static_cast<long>(rng.uniform(0.0, 6.0));
    int k = 1 + static_cast<int>(rng.uniform(0.0, 3.0));
    if (k > n) k = static_cast<int>(n);
    PointArray pts = random_points(rng, n, 2);
    LpModel model = LpModel::from_points(pts, k);
    auto [sol, dual] = solve(model);
    (void)dual;
    REQUIRE(sol.status == LpSolution::Status::optimal);
    BruteForceResult ip = brute_force_ip(pts, k);
    CHECK(sol.objective <= ip.objective + 1e-9);
    double worst = 0.0;
    for (double v : sol.y) worst = std::max(worst, std::fabs(v - std::round(v)));
    for (double v : sol.z) worst = std::max(worst, std::fabs(v - std::round(v)));
    if (worst <= 1e-6) CHECK(sol.objective == doctest::Approx(ip.objective).epsilon(1e-7));
  }
}

TEST_CASE("primal-dual pair passes feasibility and complementary slackness") {
  RngStream rng(5);
  for (int t = 0; t < 10; ++t) {
    long n = 6 + static_cast<long>(rng.uniform(0.0, 4.0));
    int k = 1 + static_cast<int>(rng.uniform(0.0, 3.0));
    Instance inst = tiny_instance(rng, n, k);
    auto [sol, dual] = solve(LpModel::build(inst));
    REQUIRE(sol.status == LpSolution::Status::optimal);
    SlacknessReport rep = complementary_slackness(inst, sol, dual);
    CHECK(rep.primal_feasible);
    CHECK(rep.dual_feasible);
    CHECK(rep.optimal_pair);
  }
}

TEST_CASE("deterministic: identical model bytes give identical solution bytes") {
  RngStream rng(6);
  PointArray pts = random_points(rng, 9, 2);
  LpModel model = LpModel::from_points(pts, 2);
  auto [s1, d1] = solve(model);
  auto [s2, d2] = solve(model);
  CHECK(s1.y == s2.y);
  CHECK(s1.z == s2.z);
  CHECK(d1.alpha == d2.alpha);
  CHECK(d1.omega == d2.omega);
}

TEST_CASE("well-separated pair solves to the ground truth") {
  MeasureSpec ball = MeasureSpec::uniform_ball(2, 1.0);
  Instance inst =
      generate({make_ball({0.0, 0.0}, 1.0, ball), make_ball({4.0, 0.0}, 1.0, ball)}, 30, 11);
  auto [sol, dual] = solve(LpModel::build(inst));
  (void)dual;
  REQUIRE(sol.status == LpSolution::Status::optimal);
  GroundTruthSolution gt = ground_truth(inst);
  CHECK(sol.objective == doctest::Approx(gt.objective).epsilon(1e-8));
  double worst = 0.0;
  for (double v : sol.z) worst = std::max(worst, std::fabs(v - std::round(v)));
  CHECK(worst <= 1e-6);
}

TEST_CASE("high-dimensional pair at delta = 2.05 (reduced size)") {
  MeasureSpec ball = MeasureSpec::uniform_ball(50, 1.0);
  std::vector<double> c1(50, 0.0), c2(50, 0.0);
  c2[0] = 2.05;
  Instance inst = generate({make_ball(c1, 1.0, ball), make_ball(c2, 1.0, ball)}, 40, 3);
  auto [sol, dual] = solve(LpModel::build(inst));
  (void)dual;
  REQUIRE(sol.status == LpSolution::Status::optimal);
  double worst = 0.0;
  for (double v : sol.z) worst = std::max(worst, std::fabs(v - std::round(v)));
  CHECK(worst <= 1e-6);
  GroundTruthSolution gt = ground_truth(inst);
  CHECK(sol.objective == doctest::Approx(gt.objective).epsilon(1e-8));
}

TEST_CASE("warm re-solve with perturbed costs stays at the vertex") {
  RngStream rng(7);
  PointArray pts = random_points(rng, 10, 2);
  LpModel model = LpModel::from_points(pts, 2);
  KMedianLpSolver solver(model);
  auto [sol, dual] = solver.run();
  (void)dual;
  REQUIRE(sol.status == LpSolution::Status::optimal);
  std::vector<double> costs = model.dist;
  for (auto& c : costs) c += 1e-9 * rng.uniform();
  auto [sol2, dual2] = solver.resolve(costs);
  (void)dual2;
  REQUIRE(sol2.status == LpSolution::Status::optimal);
  CHECK(sol2.iterations <= sol.iterations + 16);
  for (std::size_t i = 0; i < sol.z.size(); ++i) CHECK(std::fabs(sol.z[i] - sol2.z[i]) <= 1e-6);
}

TEST_CASE("size guard refuses oversized instances") {
  RngStream rng(8);
  PointArray pts = random_points(rng, 12, 2);
  LpModel model = LpModel::from_points(pts, 2);
  SolveOptions opts;
  opts.size_guard = 10;
  CHECK_THROWS_AS(solve(model, opts), std::invalid_argument);
}
