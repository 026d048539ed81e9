#include "kmedlp/gfunction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kmedlp/rng.hpp"

namespace kmedlp {

namespace {

// int_lo^hi F(s) dnu(s) for the norm law nu of the measure, splitting at the
// law's own kinks plus any kinks of F supplied by the caller.
template <class F>
double radial_integral(const MeasureSpec& measure, F&& f, std::vector<double> extra_kinks,
                       const QuadratureSpec& spec) {
  double total = 0.0;
  for (const auto& atom : measure.atoms()) total += atom.mass * f(atom.t);
  if (!measure.is_continuous()) return total;
  std::vector<double> cuts = measure.density_kinks();
  for (double c : extra_kinks)
    if (c > 0.0 && c < measure.radius()) cuts.push_back(c);
  cuts.push_back(0.0);
  cuts.push_back(measure.radius());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return std::fabs(a - b) < 1e-14; }),
             cuts.end());
  auto weighted = [&](double s) { return f(s) * measure.norm_density(s); };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += integrate(weighted, cuts[i], cuts[i + 1], spec);
  return total;
}

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

}  // namespace

double sphere_shell_contribution(double alpha, double s, double t, int m,
                                 const QuadratureSpec& spec) {
  if (alpha <= std::fabs(t - s)) return 0.0;
  if (s == 0.0 || t == 0.0) return std::max(0.0, alpha - (s + t));
  if (m == 1) {
    return 0.5 * std::max(0.0, alpha - std::fabs(t - s)) +
           0.5 * std::max(0.0, alpha - (t + s));
  }
  double theta_max = kPi;
  if (alpha < s + t)
    theta_max = std::acos(clamp_unit((s * s + t * t - alpha * alpha) / (2.0 * s * t)));
  AngleDensity density(m);
  auto integrand = [&](double theta) {
    double d2 = s * s + t * t - 2.0 * s * t * std::cos(theta);
    return (alpha - std::sqrt(std::max(0.0, d2))) * density(theta);
  };
  return integrate(integrand, 0.0, theta_max, spec);
}

double contribution(const Instance& instance, const AlphaVector& alpha,
                    std::span<const double> z) {
  if (static_cast<int>(alpha.values.size()) != instance.k)
    throw std::invalid_argument("contribution: alpha size != k");
  double total = 0.0;
  for (long q = 0; q < instance.size(); ++q) {
    double a = alpha.values[static_cast<std::size_t>(instance.labels[static_cast<std::size_t>(q)])];
    double v = a - dist(z, instance.points[q]);
    if (v > 0.0) total += v;
  }
  return total;
}

double g_value(const std::vector<BallConfig>& balls, const AlphaVector& alpha,
               std::span<const double> z, const QuadratureSpec& spec) {
  if (alpha.values.size() != balls.size())
    throw std::invalid_argument("g_value: alpha size != number of balls");
  QuadratureSpec inner{std::max(spec.abs_tol / 4.0, 1e-14), spec.rel_tol, spec.max_subdivisions};
  double total = 0.0;
  for (std::size_t i = 0; i < balls.size(); ++i) {
    double a = alpha.values[i];
    double t = dist(z, balls[i].center);
    if (a <= t - balls[i].radius || a <= 0.0) continue;
    auto shell = [&](double s) { return sphere_shell_contribution(a, s, t, balls[i].measure.dim(), inner); };
    total += balls[i].beta *
             radial_integral(balls[i].measure, shell, {a - t, t - a}, spec);
  }
  return total;
}

double t_fn(const TfnParams& params, double t, const QuadratureSpec& spec) {
  if (!(params.r > 0.0) || !(params.alpha > params.r) || params.m < 1)
    throw std::domain_error("t_fn: requires r > 0, alpha > r, m >= 1");
  if (t < 0.0 || t > params.r + 1e-12) throw std::domain_error("t_fn: t outside [0, r]");
  return (params.alpha - params.r) -
         sphere_shell_contribution(params.alpha, params.r, std::min(t, params.r), params.m, spec);
}

double h_fn(const MeasureSpec& measure, double alpha, double t, const QuadratureSpec& spec) {
  if (!(alpha > measure.radius())) throw std::domain_error("h_fn: requires alpha > radius");
  if (t < 0.0 || t > measure.radius() + 1e-12)
    throw std::domain_error("h_fn: requires ||z|| <= radius");
  t = std::min(t, measure.radius());
  QuadratureSpec inner{std::max(spec.abs_tol / 4.0, 1e-14), spec.rel_tol, spec.max_subdivisions};
  auto single_sphere = [&](double s) {
    return (alpha - s) - sphere_shell_contribution(alpha, s, t, measure.dim(), inner);
  };
  return radial_integral(measure, single_sphere, {alpha - t}, spec);
}

double h_fn(const MeasureSpec& measure, double alpha, std::span<const double> z) {
  return h_fn(measure, alpha, norm(z));
}

double r_fn(const MeasureSpec& measure, double alpha, double t, const QuadratureSpec& spec) {
  if (!(alpha > measure.radius())) throw std::domain_error("r_fn: requires alpha > radius");
  if (!(t > measure.radius())) throw std::domain_error("r_fn: requires ||z|| > radius");
  if (t >= alpha + measure.radius()) return 0.0;
  QuadratureSpec inner{std::max(spec.abs_tol / 4.0, 1e-14), spec.rel_tol, spec.max_subdivisions};
  auto shell = [&](double s) {
    return sphere_shell_contribution(alpha, s, t, measure.dim(), inner);
  };
  return radial_integral(measure, shell, {t - alpha}, spec);
}

double r_fn(const MeasureSpec& measure, double alpha, std::span<const double> z) {
  return r_fn(measure, alpha, norm(z));
}

double t_lower_bound(double r, double eps, int m) {
  if (!(r > 0.0) || !(eps > 0.0 && eps < 1.0) || m < 2)
    throw std::domain_error("t_lower_bound: requires r > 0, eps in (0,1), m >= 2");
  double geo = std::pow(1.0 - eps * eps / 16.0, 0.5 * (m - 2));
  return r * eps * eps / 8.0 - r * std::sqrt(kPi * m / 2.0) * geo;
}

double r_upper_bound(double alpha, double r, int m, double z_norm) {
  if (!(alpha > r) || m < 2 || !(z_norm > alpha) || !(z_norm < alpha + r))
    throw std::domain_error("r_upper_bound: requires alpha > r, ||z|| in (alpha, alpha+r), m >= 2");
  return (alpha + r - z_norm) * 0.5 * std::sqrt(kPi) * std::sqrt(0.5 * m) *
         std::pow(alpha / z_norm, m - 2);
}

BoundReport check_t_lower_bound(double r, double eps, int m, double t,
                                const QuadratureSpec& spec) {
  BoundReport rep;
  rep.quantity = BoundQuantity::T_lower;
  rep.bound_value = t_lower_bound(r, eps, m);
  rep.actual_value = t_fn(TfnParams{r, r * (1.0 + eps), m}, t, spec);
  rep.slack = rep.actual_value - rep.bound_value;
  return rep;
}

BoundReport check_r_upper_bound(const MeasureSpec& measure, double alpha, double t) {
  BoundReport rep;
  rep.quantity = BoundQuantity::R_upper;
  rep.bound_value = r_upper_bound(alpha, measure.radius(), measure.dim(), t);
  rep.actual_value = r_fn(measure, alpha, t);
  rep.slack = rep.bound_value - rep.actual_value;
  return rep;
}

namespace {

template <class F>
double golden_max(F&& f, double a, double b, double tol, double* arg) {
  const double phi = 0.6180339887498948482;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  *arg = 0.5 * (a + b);
  return std::max(f1, f2);
}

}  // namespace

MaximizerReport g_maximizer_check(const std::vector<BallConfig>& balls,
                                  const AlphaVector& alpha, int ball,
                                  const MaximizerSearch& settings) {
  if (ball < 0 || ball >= static_cast<int>(balls.size()))
    throw std::invalid_argument("g_maximizer_check: ball index out of range");
  const BallConfig& home = balls[static_cast<std::size_t>(ball)];
  int m = home.measure.dim();

  std::vector<std::vector<double>> dirs;
  for (std::size_t j = 0; j < balls.size(); ++j) {
    if (static_cast<int>(j) == ball) continue;
    std::vector<double> u(home.center.size());
    double d = dist(balls[j].center, home.center);
    if (d <= 0.0) continue;
    for (std::size_t c = 0; c < u.size(); ++c)
      u[c] = (balls[j].center[c] - home.center[c]) / d;
    dirs.push_back(std::move(u));
  }
  if (m == 1) {
    dirs.push_back({1.0});
    dirs.push_back({-1.0});
  } else {
    RngStream rng = RngStream(settings.seed).substream(0x64697273ULL);
    for (int j = 0; j < settings.random_directions; ++j) dirs.push_back(rng.unit_vector(m));
    if (dirs.empty()) {
      std::vector<double> e1(static_cast<std::size_t>(m), 0.0);
      e1[0] = 1.0;
      dirs.push_back(std::move(e1));
    }
  }

  auto g_at = [&](const std::vector<double>& u, double t) {
    std::vector<double> z = home.center;
    for (std::size_t c = 0; c < z.size(); ++c) z[c] += t * u[c];
    return g_value(balls, alpha, z, settings.quadrature);
  };

  MaximizerReport rep;
  rep.g_center = g_value(balls, alpha, home.center, settings.quadrature);

  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_dir = 0;
  int best_j = 1;
  for (std::size_t di = 0; di < dirs.size(); ++di) {
    for (int j = 1; j <= settings.grid_points; ++j) {
      double t = home.radius * j / settings.grid_points;
      double v = g_at(dirs[di], t);
      if (v > best) {
        best = v;
        best_dir = di;
        best_j = j;
      }
    }
  }
  // refine within the best cell but never below the first grid step: the
  // supremum over the punctured ball is approached at the center itself, so
  // the certified margin is relative to the grid resolution
  double lo = home.radius * std::max(best_j - 1, 1) / settings.grid_points;
  double hi = home.radius * std::min(best_j + 1, settings.grid_points) / settings.grid_points;
  double targ = 0.0;
  double refined = golden_max([&](double t) { return g_at(dirs[best_dir], t); }, lo, hi,
                              settings.refine_tol, &targ);
  if (refined < best) {
    refined = best;
    targ = home.radius * best_j / settings.grid_points;
  }
  rep.g_best = refined;
  rep.margin = rep.g_center - rep.g_best;
  rep.best_point = home.center;
  for (std::size_t c = 0; c < rep.best_point.size(); ++c)
    rep.best_point[c] += targ * dirs[best_dir][c];

  double threshold = 10.0 * settings.quadrature.abs_tol * double(balls.size());
  if (rep.margin > threshold)
    rep.status = MaximizerStatus::center_is_unique_max;
  else if (rep.margin < -threshold)
    rep.status = MaximizerStatus::counterexample_point;
  else
    rep.status = MaximizerStatus::inconclusive;
  return rep;
}

}  // namespace kmedlp
