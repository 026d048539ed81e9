#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "kmedlp/measures.hpp"
#include "kmedlp/numerics.hpp"
#include "kmedlp/json_io.hpp"

using namespace kmedlp;

namespace {

// KS statistic of sorted samples against a cdf given on a fine grid
double ks_against_cdf(std::vector<double> samples, const std::vector<double>& grid,
                      const std::vector<double>& cdf) {
  std::sort(samples.begin(), samples.end());
  double worst = 0.0;
  std::size_t n = samples.size();
  for (std::size_t i = 0; i < n; ++i) {
    double x = samples[i];
    auto it = std::upper_bound(grid.begin(), grid.end(), x);
    double F;
    if (it == grid.begin()) F = 0.0;
    else if (it == grid.end()) F = 1.0;
    else {
      std::size_t j = static_cast<std::size_t>(it - grid.begin());
      double w = (x - grid[j - 1]) / (grid[j] - grid[j - 1]);
      F = cdf[j - 1] + w * (cdf[j] - cdf[j - 1]);
    }
    worst = std::max(worst, std::fabs(F - double(i + 1) / double(n)));
    worst = std::max(worst, std::fabs(F - double(i) / double(n)));
  }
  return worst;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double worst = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i;
    else ++j;
    worst = std::max(worst, std::fabs(double(i) / a.size() - double(j) / b.size()));
  }
  return worst;
}

std::vector<double> angles_to_e1(const MeasureSpec& m, long n, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<double> out;
  for (long i = 0; i < n; ++i) {
    std::vector<double> x = m.sample(rng);
    double nx = norm(x);
    out.push_back(nx == 0.0 ? kPi / 2 : std::acos(std::clamp(x[0] / nx, -1.0, 1.0)));
  }
  return out;
}

}  // namespace

TEST_CASE("uniform ball: cdf, mean, sampling") {
  MeasureSpec m = MeasureSpec::uniform_ball(2, 1.0);
  CHECK(m.radial_cdf(0.5) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(m.expected_center_distance() == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK_THROWS_AS(m.radial_cdf(1.5), std::domain_error);

  // E||x|| = m/(m+1); 3 sigma band on 1e5 draws
  RngStream rng(5);
  long n = 100000;
  double acc = 0.0, acc2 = 0.0;
  for (long i = 0; i < n; ++i) {
    std::vector<double> x = m.sample(rng);
    double nx = norm(x);
    CHECK(nx <= 1.0 + 1e-12);
    acc += nx;
    acc2 += nx * nx;
  }
  double mean = acc / double(n);
  double sd = std::sqrt(std::max(0.0, acc2 / double(n) - mean * mean) / double(n));
  CHECK(std::fabs(mean - 2.0 / 3.0) <= 3.0 * sd);
}

TEST_CASE("sphere and point-mass laws") {
  MeasureSpec sph = MeasureSpec::uniform_sphere(3, 1.0, 1.0);
  RngStream rng(1);
  for (int i = 0; i < 50; ++i) CHECK(norm(sph.sample(rng)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sph.expected_center_distance() == doctest::Approx(1.0));

  MeasureSpec pm = MeasureSpec::point_mass_origin(3, 1.0);
  for (int i = 0; i < 10; ++i) {
    std::vector<double> x = pm.sample(rng);
    CHECK(norm(x) == 0.0);
  }
  CHECK(pm.radial_cdf(0.0) == 1.0);
  MeasureSpec half = MeasureSpec::uniform_sphere(2, 1.0, 0.4);
  CHECK(half.expected_center_distance() == doctest::Approx(0.4));
  CHECK(half.radial_cdf(0.3) == 0.0);
  CHECK(half.radial_cdf(0.4) == 1.0);
}

TEST_CASE("annulus law: interior mass, continuity, mean") {
  double eps = 0.01, q = 0.001;
  MeasureSpec m = MeasureSpec::annulus_concentrated(2, 1.0, eps, q);
  CHECK(m.radial_cdf(1.0 - eps) == doctest::Approx(q).epsilon(1e-12));
  CHECK(m.radial_cdf(1.0) == doctest::Approx(1.0).epsilon(1e-12));
  // continuity at the two junctions (the connector is steep, so probe close)
  for (double t : {1.0 - eps, 1.0 - eps / 2}) {
    CHECK(m.norm_density(t - 1e-12) == doctest::Approx(m.norm_density(t + 1e-12)).epsilon(1e-5));
  }
  // density integrates to one
  double total = 0.0;
  std::vector<double> cuts{0.0, 1.0 - eps, 1.0 - eps / 2, 1.0};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += integrate([&](double t) { return m.norm_density(t); }, cuts[i], cuts[i + 1]);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  double E = m.expected_center_distance();
  CHECK(E >= 1.0 - eps - 0.01);
  CHECK(E <= 1.0);
}

TEST_CASE("radial_density law: normalization and validity checks") {
  auto f = [](double t) { return 2.0 - t; };  // strictly decreasing on [0,1]
  MeasureSpec m = MeasureSpec::radial_density(3, 1.0, f, true);
  double total = integrate([&](double t) { return m.norm_density(t); }, 0.0, 1.0);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(MeasureSpec::radial_density(3, 1.0, [](double t) { return t; }, true),
                  std::invalid_argument);
  CHECK_THROWS_AS(MeasureSpec::radial_density(3, 1.0, [](double t) { return t - 2.0; }),
                  std::invalid_argument);
}

TEST_CASE("radial cdf is the antiderivative of the norm density") {
  RngStream rng(17);
  std::vector<MeasureSpec> laws{
      MeasureSpec::uniform_ball(3, 1.0),
      MeasureSpec::annulus_concentrated(2, 1.0, 0.05, 0.02),
      MeasureSpec::radial_density(2, 1.0, [](double t) { return 1.5 - t; })};
  for (const auto& m : laws) {
    for (int trial = 0; trial < 20; ++trial) {
      double a = rng.uniform(0.0, 1.0), b = rng.uniform(0.0, 1.0);
      if (a > b) std::swap(a, b);
      std::vector<double> cuts = m.density_kinks();
      cuts.push_back(a);
      cuts.push_back(b);
      std::sort(cuts.begin(), cuts.end());
      double integral = 0.0;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i] < a || cuts[i + 1] > b) continue;
        integral += integrate([&](double t) { return m.norm_density(t); }, cuts[i], cuts[i + 1]);
      }
      CHECK(std::fabs(m.radial_cdf(b) - m.radial_cdf(a) - integral) <= 1e-8);
    }
  }
}

TEST_CASE("counterexample assumption check") {
  MeasureSpec uni = MeasureSpec::uniform_ball(2, 1.0);
  CHECK_FALSE(check_counterexample_assumption(uni, 0.01).satisfied);
  // eps = 0.5 makes the left side negative regardless of the measure
  CHECK_FALSE(check_counterexample_assumption(uni, 0.5).satisfied);

  // the paper's inequality is infeasible at eps = 0.01 for every measure:
  // LHS <= 0.292 - 0.08 < 0.279 + 0.06 <= RHS
  MeasureSpec ann = MeasureSpec::annulus_concentrated(2, 1.0, 0.01, 0.001);
  AssumptionCheck at001 = check_counterexample_assumption(ann, 0.01);
  CHECK_FALSE(at001.satisfied);
  CHECK(at001.margin < -0.12);

  // it is satisfiable once eps is a few 1e-4
  MeasureSpec tight = MeasureSpec::annulus_concentrated(2, 1.0, 5e-4, 5e-4);
  AssumptionCheck ok = check_counterexample_assumption(tight, 5e-4);
  CHECK(ok.satisfied);
  CHECK(ok.margin > 0.0);
  CHECK(ok.margin == doctest::Approx(0.004356).epsilon(1e-2));
}

TEST_CASE("rotation invariance: empirical angle law matches p^(m)") {
  // KS threshold at the 0.001 significance level, n = 1e5
  const long n = 100000;
  const double ks_crit = 1.9495 / std::sqrt(double(n));
  for (int m : {2, 3}) {
    std::vector<double> grid, cdf;
    int cells = 2048;
    double acc = 0.0;
    grid.push_back(0.0);
    cdf.push_back(0.0);
    for (int i = 1; i <= cells; ++i) {
      double a = kPi * (i - 1) / cells, b = kPi * i / cells;
      acc += integrate([&](double th) { return angle_density(m, th); }, a, b,
                       QuadratureSpec{1e-12, 1e-12, 40});
      grid.push_back(b);
      cdf.push_back(acc);
    }
    for (const MeasureSpec& law :
         {MeasureSpec::uniform_ball(m, 1.0),
          MeasureSpec::annulus_concentrated(m, 1.0, 0.05, 0.02)}) {
      double ks = ks_against_cdf(angles_to_e1(law, n, 23u + unsigned(m)), grid, cdf);
      CHECK(ks < ks_crit);
    }
  }
}

TEST_CASE("angle law does not depend on the radial law") {
  const long n = 100000;
  double ks = ks_two_sample(angles_to_e1(MeasureSpec::uniform_ball(2, 1.0), n, 31),
                            angles_to_e1(MeasureSpec::annulus_concentrated(2, 1.0, 0.05, 0.02), n, 32));
  CHECK(ks < 1.9495 * std::sqrt(2.0 / double(n)));
}

TEST_CASE("the center minimizes the expected distance (Monte Carlo)") {
  const long n = 100000;
  for (const MeasureSpec& law :
       {MeasureSpec::uniform_ball(2, 1.0), MeasureSpec::annulus_concentrated(2, 1.0, 0.05, 0.02)}) {
    RngStream rng(99);
    for (double tz : {0.2, 0.5, 0.9}) {
      std::vector<double> z{tz, 0.0};
      double acc = 0.0, acc2 = 0.0;
      for (long i = 0; i < n; ++i) {
        std::vector<double> x = law.sample(rng);
        double diff = dist(z, x) - norm(x);
        acc += diff;
        acc2 += diff * diff;
      }
      double mean = acc / double(n);
      double se = std::sqrt(std::max(0.0, acc2 / double(n) - mean * mean) / double(n));
      CHECK(mean - 3.0 * se > 0.0);
    }
  }
}

TEST_CASE("measure JSON round trip") {
  MeasureSpec ann = MeasureSpec::annulus_concentrated(2, 1.0, 0.01, 0.001);
  std::string text = measure_to_json(ann);
  CHECK(text.find("\"annulus\"") != std::string::npos);
  MeasureSpec back = measure_from_json(text);
  CHECK(back == ann);
  MeasureSpec uni = MeasureSpec::uniform_ball(3, 2.0);
  CHECK(measure_from_json(measure_to_json(uni)) == uni);
  MeasureSpec rad = MeasureSpec::radial_density(2, 1.0, [](double t) { return 1.5 - t; });
  CHECK_THROWS_AS(measure_to_json(rad), std::invalid_argument);
}
